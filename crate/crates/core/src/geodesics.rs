//! Geodesics of Finsler metrics (time-optimal Zermelo paths) by fixed-step
//! RK4 on `x'' = -2 G(x, x')`, and shortest travel times by shooting.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::finsler::{spray_coefficients, FinslerMetric};

/// A sampled geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(x, x')` at each time.
    pub states: Vec<(DVector<f64>, DVector<f64>)>,
    /// `F(x, x')` at each time.
    pub f_values: Vec<f64>,
    /// Why integration stopped before `t_end`, if it did.
    pub exit: Option<String>,
}

impl Trajectory {
    pub fn exited(&self) -> bool {
        self.exit.is_some()
    }

    /// Largest `|F(t) - F(0)|` along the trajectory.
    pub fn drift(&self) -> f64 {
        let f0 = self.f_values.first().copied().unwrap_or(0.0);
        self.f_values.iter().map(|f| (f - f0).abs()).fold(0.0, f64::max)
    }

    /// CSV with header `t,x1,...,xn,F` and one row per step. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map(|s| s.0.len()).unwrap_or(0);
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",F\n");
        for ((t, (x, _)), f) in self.times.iter().zip(&self.states).zip(&self.f_values) {
            out.push_str(&format!("{t}"));
            for v in x.iter() {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{f}\n"));
        }
        out
    }
}

fn acceleration<F: FinslerMetric>(f: &F, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(spray_coefficients(f, x.as_slice(), v.as_slice())? * -2.0)
}

fn rk4_step<F: FinslerMetric>(
    f: &F,
    x: &DVector<f64>,
    v: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let a1 = acceleration(f, x, v)?;
    let (x2, v2) = (x + v * (0.5 * h), v + &a1 * (0.5 * h));
    let a2 = acceleration(f, &x2, &v2)?;
    let (x3, v3) = (x + &v2 * (0.5 * h), v + &a2 * (0.5 * h));
    let a3 = acceleration(f, &x3, &v3)?;
    let (x4, v4) = (x + &v3 * h, v + &a3 * h);
    let a4 = acceleration(f, &x4, &v4)?;
    let x_next = x + (v + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
    let v_next = v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
    Ok((x_next, v_next))
}

/// Integrates the geodesic through `x0` with initial velocity `y0` on
/// `[0, t_end]` with classic RK4 and step `dt` (the last step is shortened
/// to land on `t_end`). Leaving the domain of the metric or of strong
/// convexity truncates the trajectory and records the reason.
pub fn geodesic_ivp<F: FinslerMetric>(f: &F, x0: &[f64], y0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    let n = f.dim();
    if x0.len() != n || y0.len() != n {
        return Err(Error::Validation(format!("x0 and y0 must have {n} entries")));
    }
    if y0.iter().all(|v| *v == 0.0) {
        return Err(Error::Validation("initial velocity must be nonzero".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Validation(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}")));
    }
    let mut x = DVector::from_column_slice(x0);
    let mut v = DVector::from_column_slice(y0);
    let f0 = f.norm(x0, y0)?;
    // Reject starting points where the spray is undefined.
    acceleration(f, &x, &v)?;
    let mut traj = Trajectory { times: vec![0.0], states: vec![(x.clone(), v.clone())], f_values: vec![f0], exit: None };
    let mut t = 0.0;
    let mut step = 0usize;
    while t < t_end {
        let h = dt.min(t_end - t);
        if h <= 1e-15 * t_end.max(1.0) {
            break;
        }
        let next = rk4_step(f, &x, &v, h).and_then(|(xn, vn)| {
            let fv = f.norm(xn.as_slice(), vn.as_slice())?;
            acceleration(f, &xn, &vn)?;
            Ok((xn, vn, fv))
        });
        match next {
            Ok((xn, vn, fv)) => {
                x = xn;
                v = vn;
                step += 1;
                t = if h < dt { t_end } else { step as f64 * dt };
                traj.times.push(t);
                traj.states.push((x.clone(), v.clone()));
                traj.f_values.push(fv);
            }
            Err(e) => {
                traj.exit = Some(format!("left the strongly convex domain near t = {t}: {e}"));
                break;
            }
        }
    }
    Ok(traj)
}

/// Cubic Hermite interpolation of a trajectory segment at fraction `s`.
fn hermite(p0: &DVector<f64>, v0: &DVector<f64>, p1: &DVector<f64>, v1: &DVector<f64>, h: f64, s: f64) -> DVector<f64> {
    let s2 = s * s;
    let s3 = s2 * s;
    p0 * (2.0 * s3 - 3.0 * s2 + 1.0) + v0 * (h * (s3 - 2.0 * s2 + s)) + p1 * (-2.0 * s3 + 3.0 * s2) + v1 * (h * (s3 - s2))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimizes a unimodal function on `[lo, hi]` by golden-section search,
/// spending at most `budget` evaluations. Returns `(argmin, min, evaluations)`.
fn golden_section<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, tol: f64, budget: usize) -> (f64, f64, usize) {
    let mut c = hi - GOLDEN * (hi - lo);
    let mut d = lo + GOLDEN * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    let mut evals = 2;
    while (hi - lo).abs() > tol && evals < budget {
        if gc < gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - GOLDEN * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + GOLDEN * (hi - lo);
            gd = g(d);
        }
        evals += 1;
    }
    if gc < gd {
        (c, gc, evals)
    } else {
        (d, gd, evals)
    }
}

/// Closest approach of a trajectory to `goal` in the chart, refined by
/// Hermite interpolation: `(distance, time)`.
pub fn closest_approach(traj: &Trajectory, goal: &DVector<f64>) -> (f64, f64) {
    let dists: Vec<f64> = traj.states.iter().map(|(x, _)| (x - goal).norm()).collect();
    let (k, _) = dists.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, d)| if *d < acc.1 { (i, *d) } else { acc });
    let mut best = (dists[k], traj.times[k]);
    for seg in [k.saturating_sub(1), k] {
        if seg + 1 >= traj.states.len() {
            continue;
        }
        let (p0, v0) = &traj.states[seg];
        let (p1, v1) = &traj.states[seg + 1];
        let (t0, t1) = (traj.times[seg], traj.times[seg + 1]);
        let h = t1 - t0;
        let (s, d, _) = golden_section(|s| (hermite(p0, v0, p1, v1, h, s) - goal).norm(), 0.0, 1.0, 1e-13, 200);
        for (s, d) in [(s, d), (0.0, dists[seg]), (1.0, dists[seg + 1])] {
            if d < best.0 {
                best = (d, t0 + s * h);
            }
        }
    }
    best
}

/// Options of the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub dt: f64,
    /// Evaluation budget of the direction search.
    pub budget: usize,
    /// Integration horizon as a multiple of the straight-line travel time.
    pub horizon_factor: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions { dt: 1e-2, budget: 500, horizon_factor: 1.5 }
    }
}

/// Outcome of [`shortest_time`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    /// Initial velocity with `F = 1`.
    pub direction: DVector<f64>,
    /// Arrival time, equal to the travel time because `F = 1` along the path.
    pub time: f64,
    /// Distance from the goal at arrival.
    pub residual: f64,
    pub evaluations: usize,
}

/// Travel time along the straight chart segment from `a` to `b`, i.e. the
/// Finsler length of the segment (composite Simpson rule).
pub fn straight_line_time<F: FinslerMetric>(f: &F, a: &[f64], b: &[f64], intervals: usize) -> Result<f64> {
    let av = DVector::from_column_slice(a);
    let dir = DVector::from_column_slice(b) - &av;
    let m = intervals.max(2) + intervals % 2;
    let mut sum = 0.0;
    for i in 0..=m {
        let s = i as f64 / m as f64;
        let x = &av + &dir * s;
        let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f.norm(x.as_slice(), dir.as_slice())?;
    }
    Ok(sum / (3.0 * m as f64))
}

fn direction_from_angles(angles: &[f64]) -> DVector<f64> {
    match angles.len() {
        1 => DVector::from_vec(vec![angles[0].cos(), angles[0].sin()]),
        _ => {
            let (th, ph) = (angles[0], angles[1]);
            DVector::from_vec(vec![ph.sin() * th.cos(), ph.sin() * th.sin(), ph.cos()])
        }
    }
}

/// Nelder-Mead minimization from the simplex `start`, with a budget.
fn nelder_mead<G: FnMut(&[f64]) -> f64>(mut g: G, start: Vec<Vec<f64>>, tol: f64, budget: usize) -> (Vec<f64>, f64, usize) {
    let mut simplex: Vec<(Vec<f64>, f64)> = start.into_iter().map(|p| {
        let v = g(&p);
        (p, v)
    }).collect();
    let mut evals = simplex.len();
    let dim = simplex.len() - 1;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[dim].1 - simplex[0].1 <= tol && simplex[dim].1 <= tol {
            break;
        }
        let spread = simplex.iter().map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
        if spread < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..dim).map(|i| simplex[..dim].iter().map(|(p, _)| p[i]).sum::<f64>() / dim as f64).collect();
        let worst = simplex[dim].clone();
        let reflected = lerp(&centroid, &worst.0, -1.0);
        let fr = g(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -2.0);
            let fe = g(&expanded);
            evals += 1;
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = lerp(&centroid, &worst.0, 0.5);
            let fc = g(&contracted);
            evals += 1;
            if fc < worst.1 {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    entry.0 = lerp(&best, &entry.0, 0.5);
                    entry.1 = g(&entry.0);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (p, v) = simplex.swap_remove(0);
    (p, v, evals)
}

/// Shortest travel time from `start` to `goal` by shooting over initial
/// directions: golden-section search over the angle for `n = 2`, and
/// Nelder-Mead over the direction sphere for `n = 3`. Fails with a search
/// error when no direction reaches within `tol_pos` of the goal.
pub fn shortest_time<F: FinslerMetric>(
    f: &F,
    start: &[f64],
    goal: &[f64],
    tol_pos: f64,
    opts: ShootingOptions,
) -> Result<ShootingResult> {
    let n = f.dim();
    if !(n == 2 || n == 3) {
        return Err(Error::Validation(format!("shooting supports dimensions 2 and 3, got {n}")));
    }
    if start.len() != n || goal.len() != n {
        return Err(Error::Validation(format!("start and goal must have {n} entries")));
    }
    let goal_v = DVector::from_column_slice(goal);
    let line = straight_line_time(f, start, goal, 400).unwrap_or(f64::NAN);
    let horizon = if line.is_finite() && line > 0.0 { opts.horizon_factor * line } else { 10.0 };

    let shoot = |angles: &[f64]| -> (f64, f64, DVector<f64>) {
        let d = direction_from_angles(angles);
        let unit = match f.norm(start, d.as_slice()) {
            Ok(fd) if fd > 0.0 => d / fd,
            _ => return (f64::INFINITY, f64::NAN, DVector::zeros(n)),
        };
        match geodesic_ivp(f, start, unit.as_slice(), horizon, opts.dt) {
            Ok(traj) => {
                let (dist, t) = closest_approach(&traj, &goal_v);
                (dist, t, unit)
            }
            Err(_) => (f64::INFINITY, f64::NAN, unit),
        }
    };

    let (best_angles, evaluations) = if n == 2 {
        let scan = 64;
        let step = std::f64::consts::TAU / scan as f64;
        let (mut best_th, mut best) = (0.0, f64::INFINITY);
        for i in 0..scan {
            let th = i as f64 * step;
            let d = shoot(&[th]).0;
            if d < best {
                best = d;
                best_th = th;
            }
        }
        let budget = opts.budget.saturating_sub(scan).max(2);
        let (th, _, evals) = golden_section(|th| shoot(&[th]).0, best_th - step, best_th + step, 1e-12, budget);
        (vec![th], scan + evals)
    } else {
        let (nt, np) = (12, 6);
        let (st, sp) = (std::f64::consts::TAU / nt as f64, std::f64::consts::PI / np as f64);
        let (mut best_a, mut best) = (vec![0.0, 0.5 * sp], f64::INFINITY);
        for i in 0..nt {
            for j in 0..np {
                let a = vec![i as f64 * st, (j as f64 + 0.5) * sp];
                let d = shoot(&a).0;
                if d < best {
                    best = d;
                    best_a = a;
                }
            }
        }
        let scan = nt * np;
        let simplex = vec![
            best_a.clone(),
            vec![best_a[0] + 0.5 * st, best_a[1]],
            vec![best_a[0], best_a[1] + 0.5 * sp],
        ];
        let budget = opts.budget.saturating_sub(scan).max(3);
        let (a, _, evals) = nelder_mead(|p| shoot(p).0, simplex, 0.1 * tol_pos, budget);
        (a, scan + evals)
    };

    let (residual, time, direction) = shoot(&best_angles);
    if residual <= tol_pos {
        Ok(ShootingResult { direction, time, residual, evaluations })
    } else {
        Err(Error::Search(format!(
            "no direction reached within {tol_pos:.1e} of the goal after {evaluations} evaluations (best residual {residual:.3e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsler::NavigationMetric;
    use crate::spaceforms::SpaceFormModel;
    use crate::winds::WindSpec;
    use nalgebra::DMatrix;

    #[test]
    fn constant_wind_geodesic_is_straight() {
        let model = SpaceFormModel::euclidean(2).unwrap();
        let wind = WindSpec::new(model, 0.0, DMatrix::zeros(2, 2), DVector::from_vec(vec![0.5, 0.0])).unwrap();
        let f = NavigationMetric { wind };
        let traj = geodesic_ivp(&f, &[0.0, 0.0], &[0.3, 0.4], 1.0, 0.1).unwrap();
        let (x, _) = traj.states.last().unwrap();
        assert!((x[0] - 0.3).abs() < 1e-12 && (x[1] - 0.4).abs() < 1e-12);
        assert_eq!(traj.times.len(), 11);
        assert!(traj.to_csv().starts_with("t,x1,x2,F\n"));
    }
}

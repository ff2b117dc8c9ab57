//! Bracketed scalar root finding.

/// Finds a root of `f` in [lo, hi] given a sign change, by regula falsi
/// (Illinois variant) with bisection fallback. Stops when the bracket is
/// narrower than `xtol` or f vanishes.
pub fn bracketed<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    let mut side = 0i8;
    for iter in 0..400 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        // Secant step, forced to bisection every fourth iteration to
        // guarantee bracket shrinkage.
        let mut x = if iter % 4 == 3 { 0.5 * (lo + hi) } else { (lo * fhi - hi * flo) / (fhi - flo) };
        if !(x > lo.min(hi) && x < lo.max(hi)) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == fhi.signum() {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        } else {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        }
    }
    Some(if flo.abs() < fhi.abs() { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = bracketed(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        // Kink at the root: |x|^0.3 sign(x)
        let r = bracketed(|x: f64| (x - 0.1).abs().powf(0.3) * (x - 0.1).signum(), -1.0, 3.0, 1e-13).unwrap();
        assert!((r - 0.1).abs() < 1e-12);
        assert!(bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}

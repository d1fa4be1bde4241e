//! Shared scalar minimization helpers (internal).

/// Golden-section search for the minimum of `f` on `[a, b]`, run until the
/// bracket width drops below `rel_tol * scale`. Assumes unimodality on the
/// bracket; callers narrow the bracket with a grid scan first when the
/// landscape is multimodal.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64, scale: f64) -> (f64, u32) {
    const INVPHI: f64 = 0.6180339887498949;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0u32;
    while (b - a) > rel_tol * scale && iters < 200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    (0.5 * (a + b), iters)
}

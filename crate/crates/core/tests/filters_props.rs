mod common;

use locapprox::{FilterKind, FilterSpec, Mask};
use proptest::prelude::*;

fn smooth() -> impl Strategy<Value = FilterSpec> {
    prop_oneof![Just(FilterKind::Quintic), Just(FilterKind::SmoothBump)].prop_map(FilterSpec::new)
}

#[test]
fn tilde_mask_is_identity_on_support_of_g() {
    for kind in [FilterKind::Quintic, FilterKind::SmoothBump] {
        let f = FilterSpec::new(kind);
        for i in 0..=10_000 {
            let t = 2.0 * i as f64 / 10_000.0;
            let g = f.mask(Mask::G, t).unwrap();
            let gt = f.mask(Mask::GTilde, t).unwrap();
            assert!((g * gt - g).abs() <= 1e-12, "{kind:?} t={t}");
        }
    }
}

#[test]
fn dyadic_masks_telescope() {
    common::check(200, (smooth(), 0.0..2.0f64, 1u32..=10), |(f, t, levels)| {
        let mut sum = f.eval(t);
        for j in 1..=levels {
            sum += f.mask(Mask::G, t / 2f64.powi(j as i32)).unwrap();
        }
        let target = f.eval(t / 2f64.powi(levels as i32));
        prop_assert!((sum - target).abs() <= 1e-12);
        Ok(())
    });
}

#[test]
fn quintic_is_continuously_differentiable_at_knots() {
    let f = FilterSpec::quintic();
    let step = 1e-8;
    for knot in [0.5, 1.0] {
        let left = (f.eval(knot) - f.eval(knot - step)) / step;
        let right = (f.eval(knot + step) - f.eval(knot)) / step;
        assert!((left - right).abs() < 1e-6, "knot {knot}: {left} vs {right}");
    }
}

#[test]
fn filters_are_even_and_bounded() {
    common::check(500, (smooth(), -3.0..3.0f64), |(f, t)| {
        let v = f.eval(t);
        prop_assert_eq!(v, f.eval(-t));
        prop_assert!((0.0..=1.0).contains(&v));
        if t.abs() <= 0.5 {
            prop_assert_eq!(v, 1.0);
        }
        if t.abs() >= 1.0 {
            prop_assert_eq!(v, 0.0);
        }
        Ok(())
    });
}

use super::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn jet(src: &str, vars: &[(&str, f64)], params: &[(&str, f64)]) -> JetValue {
    Expression::parse(src)
        .unwrap()
        .eval_jet(vars, params, Order::Hess)
        .unwrap()
}

#[test]
fn parse_collects_symbols() {
    let e = Expression::parse("(R + r*cos(u))*cos(v)").unwrap();
    let mut syms = e.symbols();
    syms.sort();
    assert_eq!(syms, vec!["R", "r", "u", "v"]);
}

#[test]
fn unbalanced_paren_is_positioned() {
    let err = Expression::parse("sin(").unwrap_err();
    match err {
        ExprError::Syntax { line, col, .. } => {
            assert_eq!(line, 1);
            assert_eq!(col, 5);
        }
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn plain_arithmetic() {
    let e = Expression::parse("x + y*z").unwrap();
    let v = e.eval(&[("x", 1.0), ("y", 2.0), ("z", 3.0)], &[]).unwrap();
    assert_eq!(v, 7.0);
}

#[test]
fn sine_jet_at_zero() {
    let j = jet("sin(u)", &[("u", 0.0)], &[]);
    assert_eq!(j.value, 0.0);
    assert_eq!(j.gradient[0], 1.0);
}

#[test]
fn bilinear_jet() {
    let j = jet("u*v", &[("u", 2.0), ("v", 3.0)], &[]);
    assert_eq!(j.value, 6.0);
    assert_eq!(j.gradient, vec![3.0, 2.0]);
    assert_eq!(j.hess(0, 1), 1.0);
    assert_eq!(j.hess(0, 0), 0.0);
    assert_eq!(j.hess(1, 1), 0.0);
}

#[test]
fn squared_sum_jet_with_params() {
    // d/du (R + r cos u)^2 = 2 (R + r cos u) (-r sin u) = 0 at u = 0
    let j = jet(
        "(R + r*cos(u))^2",
        &[("u", 0.0)],
        &[("R", 2.0), ("r", 1.0)],
    );
    assert_eq!(j.value, 9.0);
    assert_eq!(j.gradient[0], 0.0);
}

#[test]
fn unknown_function_rejected() {
    match Expression::parse("sinh(x)").unwrap_err() {
        ExprError::UnknownFunction { name, .. } => assert_eq!(name, "sinh"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fractional_exponent_rejected() {
    assert!(matches!(
        Expression::parse("x^0.5").unwrap_err(),
        ExprError::NonIntegerExponent { .. }
    ));
    // negative integer exponents are fine
    let j = jet("x^-2", &[("x", 2.0)], &[]);
    assert_eq!(j.value, 0.25);
    assert_eq!(j.gradient[0], -2.0 * 2.0f64.powi(-3));
}

#[test]
fn unbound_symbol_fails_eval() {
    let e = Expression::parse("x + q").unwrap();
    match e.eval(&[("x", 1.0)], &[]).unwrap_err() {
        ExprError::UnboundSymbol(name) => assert_eq!(name, "q"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn domain_error_names_subexpression() {
    let e = Expression::parse("1 + log(x - 4)").unwrap();
    match e.eval(&[("x", 1.0)], &[]).unwrap_err() {
        ExprError::Domain { what, subexpr } => {
            assert!(what.contains("log"));
            assert_eq!(subexpr, "log(x - 4)");
        }
        other => panic!("unexpected {other:?}"),
    }
    let e = Expression::parse("sqrt(-1 - x^2)").unwrap();
    assert!(matches!(
        e.eval(&[("x", 1.0)], &[]).unwrap_err(),
        ExprError::Domain { .. }
    ));
}

#[test]
fn pi_is_builtin() {
    let e = Expression::parse("cos(pi)").unwrap();
    assert_eq!(e.eval(&[], &[]).unwrap(), -1.0);
}

#[test]
fn eval_is_deterministic() {
    let e = Expression::parse("sin(x)*exp(y) + atan2(y, x)^3").unwrap();
    let a = jet("sin(x)*exp(y) + atan2(y, x)^3", &[("x", 0.7), ("y", -1.3)], &[]);
    let b = e
        .eval_jet(&[("x", 0.7), ("y", -1.3)], &[], Order::Hess)
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn bump_poly_profile() {
    let e = Expression::parse("bumppoly5(s)").unwrap();
    assert_eq!(e.eval(&[("s", 0.0)], &[]).unwrap(), 1.0);
    assert_eq!(e.eval(&[("s", 1.0)], &[]).unwrap(), 0.0);
    assert_eq!(e.eval(&[("s", 7.5)], &[]).unwrap(), 0.0);
    // C^2 at the boundary: value, first and second derivative all -> 0
    let j = e.eval_jet(&[("s", 1.0 - 1e-7)], &[], Order::Hess).unwrap();
    assert!(j.value < 1e-30);
    assert!(j.gradient[0].abs() < 1e-25);
    assert!(j.hess(0, 0).abs() < 1e-18);
    // outside the support everything is exactly zero
    let j = e.eval_jet(&[("s", 2.0)], &[], Order::Hess).unwrap();
    assert_eq!((j.value, j.gradient[0], j.hess(0, 0)), (0.0, 0.0, 0.0));
}

#[test]
fn zero_annihilates_undefined_factor() {
    // bumppoly5 of a huge argument multiplies an expression with a pole:
    // the product must be an exact zero jet, not NaN.
    let e = Expression::parse("bumppoly5(1/(x^2)) * (1/x)").unwrap();
    let j = e.eval_jet(&[("x", 0.0)], &[], Order::Hess).unwrap();
    assert_eq!((j.value, j.gradient[0]), (0.0, 0.0));
}

// -- round trips ------------------------------------------------------------

fn assert_round_trip(src: &str) {
    let mut b = DagBuilder::new();
    let r1 = parse_into(&mut b, src).unwrap();
    let printed = print_node(b.dag(), r1);
    let r2 = parse_into(&mut b, &printed).unwrap();
    assert_eq!(r1, r2, "round trip changed structure: `{src}` -> `{printed}`");
}

#[test]
fn print_parse_round_trip() {
    for src in [
        "(R + r*cos(u))*cos(v)",
        "a - (b - c)",
        "a - b - c",
        "-(a*b) + (-a)*b",
        "(x^2)^3",
        "(x + y)^-3",
        "atan2(y, x)/sqrt(1 + x^2)",
        "sin(cos(tan(x))) * exp(log(y))",
        "1/(2*sqrt(q))",
        "bumppoly3((u - 1)^2 + v^2)",
        "2e-3*x + .5",
    ] {
        assert_round_trip(src);
    }
}

// -- derivatives vs central finite differences --------------------------------

/// Random closed expression over vars x, y using differentiation-safe ops.
fn random_expr(b: &mut DagBuilder, rng: &mut StdRng, depth: u32) -> NodeId {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => b.sym("x"),
            1 => b.sym("y"),
            _ => {
                let v: f64 = rng.gen_range(-2.0..2.0);
                b.num(v)
            }
        };
    }
    match rng.gen_range(0..8) {
        0 => {
            let (l, r) = (
                random_expr(b, rng, depth - 1),
                random_expr(b, rng, depth - 1),
            );
            b.add(l, r)
        }
        1 => {
            let (l, r) = (
                random_expr(b, rng, depth - 1),
                random_expr(b, rng, depth - 1),
            );
            b.sub(l, r)
        }
        2 => {
            let (l, r) = (
                random_expr(b, rng, depth - 1),
                random_expr(b, rng, depth - 1),
            );
            b.mul(l, r)
        }
        3 => {
            let a = random_expr(b, rng, depth - 1);
            b.call1(Func1::Sin, a)
        }
        4 => {
            let a = random_expr(b, rng, depth - 1);
            b.call1(Func1::Cos, a)
        }
        5 => {
            let a = random_expr(b, rng, depth - 1);
            b.pow(a, rng.gen_range(2..4))
        }
        6 => {
            let (l, r) = (
                random_expr(b, rng, depth - 1),
                random_expr(b, rng, depth - 1),
            );
            b.atan2(l, r)
        }
        _ => {
            let a = random_expr(b, rng, depth - 1);
            // keep exp arguments bounded
            let s = b.call1(Func1::Sin, a);
            b.call1(Func1::Exp, s)
        }
    }
}

#[test]
fn jets_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(20240811);
    let mut tested = 0;
    while tested < 60 {
        let mut b = DagBuilder::new();
        let root = random_expr(&mut b, &mut rng, 4);
        let set = ExprSet {
            dag: std::sync::Arc::new(b.finish()),
            roots: vec![root],
        };
        let mut prog = match Program::compile(&set, &["x", "y"], &[]) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let x: f64 = rng.gen_range(-1.5..1.5);
        let y: f64 = rng.gen_range(-1.5..1.5);
        let mut value_at = |px: f64, py: f64| -> f64 { prog.eval(&[px, py], Order::Value).unwrap().value(0) };
        let h = 1e-5;
        let fd_x = (value_at(x + h, y) - value_at(x - h, y)) / (2.0 * h);
        let fd_y = (value_at(x, y + h) - value_at(x, y - h)) / (2.0 * h);
        let fd_xx = (value_at(x + h, y) - 2.0 * value_at(x, y) + value_at(x - h, y)) / (h * h);
        let fd_xy = (value_at(x + h, y + h) - value_at(x + h, y - h) - value_at(x - h, y + h)
            + value_at(x - h, y - h))
            / (4.0 * h * h);
        let slab_owner = {
            let mut p2 = Program::compile(&set, &["x", "y"], &[]).unwrap();
            let s = p2.eval(&[x, y], Order::Hess).unwrap();
            (
                s.value(0),
                s.grad(0, 0),
                s.grad(0, 1),
                s.hess(0, 0, 0),
                s.hess(0, 0, 1),
            )
        };
        let (v, gx, gy, hxx, hxy) = slab_owner;
        if !v.is_finite() || v.abs() > 1e4 || gx.abs() > 1e4 || gy.abs() > 1e4 {
            continue; // skip numerically wild samples
        }
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
        assert!(rel(gx, fd_x) < 1e-6, "d/dx mismatch: {gx} vs {fd_x}");
        assert!(rel(gy, fd_y) < 1e-6, "d/dy mismatch: {gy} vs {fd_y}");
        if hxx.abs() < 1e4 && hxy.abs() < 1e4 {
            assert!(rel(hxx, fd_xx) < 1e-4, "d2/dx2 mismatch: {hxx} vs {fd_xx}");
            assert!(rel(hxy, fd_xy) < 1e-4, "d2/dxdy mismatch: {hxy} vs {fd_xy}");
        }
        tested += 1;
    }
}

#[test]
fn symbolic_derivative_matches_jet_gradient() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..40 {
        let mut b = DagBuilder::new();
        let root = random_expr(&mut b, &mut rng, 3);
        let droot = differentiate(&mut b, root, "x");
        let set = ExprSet {
            dag: std::sync::Arc::new(b.finish()),
            roots: vec![root, droot],
        };
        let mut prog = Program::compile(&set, &["x", "y"], &[]).unwrap();
        let x: f64 = rng.gen_range(-1.2..1.2);
        let y: f64 = rng.gen_range(-1.2..1.2);
        let slab = prog.eval(&[x, y], Order::Grad).unwrap();
        let (jet_dx, sym_dx) = (slab.grad(0, 0), slab.value(1));
        if !jet_dx.is_finite() || jet_dx.abs() > 1e6 {
            continue;
        }
        assert!(
            (jet_dx - sym_dx).abs() <= 1e-9 * jet_dx.abs().max(1.0),
            "symbolic {sym_dx} vs jet {jet_dx}"
        );
    }
}

#[test]
fn param_rebinding_without_reparse() {
    let set = ExprSet::parse_all(&["(R + r*cos(u))^2"]).unwrap();
    let mut prog = Program::compile(&set, &["u"], &[("R", 2.0), ("r", 1.0)]).unwrap();
    assert_eq!(prog.eval(&[0.0], Order::Value).unwrap().value(0), 9.0);
    prog.set_param("R", 3.0).unwrap();
    assert_eq!(prog.eval(&[0.0], Order::Value).unwrap().value(0), 16.0);
    assert!(prog.set_param("nope", 1.0).is_err());
}

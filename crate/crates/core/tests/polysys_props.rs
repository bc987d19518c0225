mod common;

use common::{random_point, rng};
use deflation::fixtures::{cbms1, cubic_staircase, synthetic_bench, x1_x2_fourth};
use deflation::linalg::C64;
use deflation::polysys::{parse_system, PolySystem, Polynomial};

fn systems() -> Vec<PolySystem> {
    vec![
        x1_x2_fourth(),
        cubic_staircase(),
        cbms1(),
        synthetic_bench(4, 11),
        parse_system("2\nx y\n(0.5-2i)*x^3*y^2 - x*y + 4;\n(1+1i)*y^5 - x;").unwrap(),
    ]
}

#[test]
fn partials_match_central_differences() {
    let mut r = rng(20);
    let step = 1e-6;
    for f in systems() {
        let n = f.nvars();
        for _ in 0..20 {
            let x = random_point(&mut r, n, 1.0);
            let jac = f.jacobian().evaluate(&x).unwrap();
            for j in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += step;
                xm[j] -= step;
                let fp = f.evaluate(&xp).unwrap();
                let fm = f.evaluate(&xm).unwrap();
                for i in 0..f.neqs() {
                    let fd = (fp[i] - fm[i]) / (2.0 * step);
                    let exact = jac[(i, j)];
                    assert!(
                        (fd - exact).norm() <= 1e-5 * (1.0 + exact.norm()),
                        "entry ({i},{j}): {fd} vs {exact}"
                    );
                }
            }
        }
    }
}

#[test]
fn evaluation_is_linear() {
    let mut r = rng(21);
    for f in systems() {
        let g = PolySystem::new(
            f.names().to_vec(),
            f.equations()
                .iter()
                .map(|p| p.mul(p).add(&Polynomial::constant(f.nvars(), C64::new(0.3, -1.0))))
                .collect(),
        )
        .unwrap();
        let sum = f.add(&g).unwrap();
        for _ in 0..20 {
            let x = random_point(&mut r, f.nvars(), 1.0);
            let (a, b, s) = (f.evaluate(&x).unwrap(), g.evaluate(&x).unwrap(), sum.evaluate(&x).unwrap());
            for i in 0..f.neqs() {
                let expect = a[i] + b[i];
                assert!((s[i] - expect).norm() <= 1e-12 * expect.norm().max(1.0));
            }
        }
    }
}

#[test]
fn evaluation_is_bit_reproducible() {
    let f = synthetic_bench(8, 3);
    let x = random_point(&mut rng(22), 8, 1.0);
    let a = f.evaluate(&x).unwrap();
    let b = f.clone().evaluate(&x).unwrap();
    assert_eq!(a, b);
}

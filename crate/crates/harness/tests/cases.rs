//! Each case's source is the Laplacian of its reference solution.

use amrmg::BoundarySpec;
use amrmg_harness::cases::{Case, CaseParams, CaseRegistry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fd_laplacian(case: &dyn Case, p: [f64; 3], h: f64) -> f64 {
    let c = case.u_ref(p);
    (0..3)
        .map(|d| {
            let (mut a, mut b) = (p, p);
            a[d] += h;
            b[d] -= h;
            (case.u_ref(a) - 2.0 * c + case.u_ref(b)) / (h * h)
        })
        .sum()
}

fn check(case: &dyn Case, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 3]> = (0..1000).map(|_| [0; 3].map(|_| rng.gen_range(0.02..0.98))).collect();
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(case.f(*p).abs()));
    assert!(scale > 0.0);
    for p in pts {
        // Richardson step removes the O(h²) term, which alone is ~1e-6 for the narrow Gaussian
        let fd = (4.0 * fd_laplacian(case, p, 1e-4) - fd_laplacian(case, p, 2e-4)) / 3.0;
        let err = (fd - case.f(p)).abs() / scale;
        assert!(err <= 1e-6, "{} {}: error {err:e} at {p:?}", case.name(), case.bc());
    }
}

#[test]
fn sources_match_finite_differences() {
    let reg = CaseRegistry::default();
    let mut n = 0;
    for (name, bcs) in [
        ("gaussian", vec![BoundarySpec::PPP]),
        ("product", vec![BoundarySpec::PPP, BoundarySpec::UPP, BoundarySpec::UUP, BoundarySpec::UUU]),
        ("vortex-x", vec![BoundarySpec::UUP]),
        ("vortex-y", vec![BoundarySpec::UUP]),
    ] {
        for bc in bcs {
            let case = reg.create(name, &CaseParams { bc, ..Default::default() }).unwrap();
            check(case.as_ref(), n);
            n += 1;
        }
    }
}

#[test]
fn gaussian_vanishes_on_the_boundary() {
    let reg = CaseRegistry::default();
    let g = reg.create("gaussian", &CaseParams::default()).unwrap();
    assert!(g.u_ref([0.0, 0.5, 0.5]) < f64::EPSILON);
}

#[test]
fn vortex_criterion_is_the_vorticity() {
    let reg = CaseRegistry::default();
    let v = reg.create("vortex-x", &CaseParams { bc: BoundarySpec::UUP, ..Default::default() }).unwrap();
    assert_eq!(v.criterion([0.5, 0.95, 0.3]), 0.0);
    assert!(v.criterion([0.5, 0.5, 0.3]) > 0.0);
}

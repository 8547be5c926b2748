use amrmg::oracles::{dirichlet_lgf_2d, dirichlet_lgf_3d, log_2d, newton_3d};
use amrmg::spectral::{lgf_table_nd, mehrstellen};

const EXTENT: usize = 8;

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn tables_match_truncated_lattice_3d() {
    for m in [2, 4, 6] {
        let op = mehrstellen(m).unwrap();
        let t = lgf_table_nd(op.as_ref(), 3, EXTENT, 1.0, 1e-10).unwrap();
        let oracle = dirichlet_lgf_3d(m, 48, EXTENT, newton_3d);
        let err = max_rel(t.values(), &oracle);
        println!("3D M={m}: {err:e}");
        assert!(err < 1e-6, "M={m}: {err:e}");
    }
}

#[test]
fn tables_match_truncated_lattice_2d() {
    for m in [2, 4, 6] {
        let op = mehrstellen(m).unwrap();
        let t = lgf_table_nd(op.as_ref(), 2, EXTENT, 1.0, 1e-10).unwrap();
        let oracle = dirichlet_lgf_2d(m, 400, EXTENT, log_2d);
        let err = max_rel(t.values(), &oracle);
        println!("2D M={m}: {err:e}");
        assert!(err < 1e-6, "M={m}: {err:e}");
    }
}

#[test]
fn origin_value_of_seven_point_kernel() {
    let op = mehrstellen(2).unwrap();
    let h = 0.125;
    let t = lgf_table_nd(op.as_ref(), 3, 2, h, 1e-10).unwrap();
    let g0 = h * t.get(&[0, 0, 0]).unwrap();
    assert!((g0 + 0.2527).abs() < 1e-4, "{g0}");
}

//! The bundled meshes under `data/` are the serialized output of the fixture
//! generators. Set `DUALVOL_REGENERATE=1` to rewrite them.

use std::path::PathBuf;

use dualvol::experiments::{delaunay_violation, non_delaunay_fixtures, shell_fixtures, Fixture};
use dualvol::mesh::{read_medit, save_medit, ShellLabels};

fn data_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(kind)
}

fn check_bundled(kind: &str, fixtures: &[Fixture]) {
    let regenerate = std::env::var_os("DUALVOL_REGENERATE").is_some();
    for fx in fixtures {
        let path = data_dir(kind).join(format!("{}.mesh", fx.name));
        let text = save_medit(&fx.mesh);
        if regenerate {
            std::fs::write(&path, &text).unwrap();
        }
        let bundled = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(bundled == text, "{} differs from its generator", path.display());
        assert_eq!(read_medit(&path).unwrap(), fx.mesh, "{}", fx.name);
    }
}

#[test]
fn bundled_fixtures_match_generators() {
    check_bundled("fixtures", &non_delaunay_fixtures().unwrap());
}

#[test]
fn bundled_shells_match_generators() {
    check_bundled("shells", &shell_fixtures().unwrap());
}

#[test]
fn fixtures_are_small_and_non_delaunay() {
    let fixtures = non_delaunay_fixtures().unwrap();
    assert!(fixtures.len() >= 10);
    for fx in &fixtures {
        assert!(fx.mesh.num_vertices() <= 3000, "{}", fx.name);
        assert_eq!(fx.mesh.connected_components(), 1, "{}", fx.name);
        assert!(delaunay_violation(&fx.mesh).is_some(), "{} is Delaunay", fx.name);
    }
}

#[test]
fn shells_carry_three_label_sets() {
    let labels = ShellLabels::default();
    for fx in shell_fixtures().unwrap() {
        for l in [labels.inner, labels.outer, labels.middle] {
            assert!(fx.mesh.labels().contains(&l), "{} lacks label {l}", fx.name);
        }
    }
}

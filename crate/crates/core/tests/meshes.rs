//! The bundled unit meshes are the primitives the exporter names in visuals.
//! Set `MODELFORGE_BLESS=1` to rewrite them.

use std::path::PathBuf;

use modelforge::mesh::{load_mesh, volume_properties, write_mesh, PrimitiveKind};

fn mesh_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/meshes")
}

#[test]
fn bundled_unit_meshes_match_primitives() {
    let bless = std::env::var_os("MODELFORGE_BLESS").is_some();
    for kind in [PrimitiveKind::Cuboid, PrimitiveKind::Cylinder, PrimitiveKind::Sphere] {
        let path = mesh_dir().join(kind.unit_mesh_name());
        let expected = write_mesh(&kind.unit_mesh());
        if bless {
            std::fs::write(&path, &expected).unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, expected, "{} is stale", path.display());
        let mesh = load_mesh(&text).unwrap();
        assert_eq!(mesh, kind.unit_mesh());
        let props = volume_properties(&mesh).unwrap();
        assert!(props.volume > 0.0 && props.volume <= 1.0);
        assert!(props.centroid.norm() < 1e-12);
    }
}

//! Triangle meshes: loading, primitive generation and mass properties.
//!
//! Volume, centroid and inertia are exact for closed polyhedra: every
//! triangle forms a signed tetrahedron with the origin and the integrals
//! are accumulated in closed form.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::diag::{Code, Diagnostic};

/// Relative closedness tolerance against the bounding-box volume.
pub const CLOSEDNESS_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_CYLINDER_SLICES: usize = 32;
pub const DEFAULT_SPHERE_SUBDIVISIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("mesh is not closed: {0}")]
    Open(String),
    #[error("mesh faces point inward (signed volume {0})")]
    Inverted(f64),
    #[error("a mesh is required for the mean-density mass policy")]
    MissingMesh,
    #[error("user inertia is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricInertia { asymmetry: f64 },
    #[error("primitive dimension {0} must be strictly positive")]
    NonPositiveDimension(f64),
    #[error("{kind} takes {expected} dimensions, got {found}")]
    DimensionCount {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
}

impl MeshError {
    pub fn code(&self) -> Code {
        match self {
            MeshError::Malformed { .. } => Code::MalformedMesh,
            MeshError::Open(_) | MeshError::Inverted(_) => Code::OpenMesh,
            MeshError::MissingMesh => Code::MissingMesh,
            MeshError::AsymmetricInertia { .. } => Code::AsymmetricUserInertia,
            MeshError::NonPositiveDimension(_) => Code::NonPositiveDimension,
            MeshError::DimensionCount { .. } => Code::InvalidValue,
        }
    }
}

impl From<MeshError> for Diagnostic {
    fn from(e: MeshError) -> Self {
        let line = match &e {
            MeshError::Malformed { line, .. } => Some(*line),
            _ => None,
        };
        let mut d = Diagnostic::error(e.code(), e.to_string());
        d.line = line;
        d
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vector3<f64>>,
    /// Counter-clockwise seen from outside.
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn scaled(&self, scale: &Vector3<f64>) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| v.component_mul(scale)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn translated(&self, offset: &Vector3<f64>) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn reversed(&self) -> TriMesh {
        TriMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        }
    }

    fn bounding_box_volume(&self) -> f64 {
        let Some(first) = self.vertices.first() else {
            return 0.0;
        };
        let (lo, hi) = self
            .vertices
            .iter()
            .fold((*first, *first), |(lo, hi), v| (lo.inf(v), hi.sup(v)));
        let d = hi - lo;
        d.x * d.y * d.z
    }

    /// Closed and consistently oriented: after welding coincident vertices
    /// every directed edge occurs once and its reverse occurs once.
    fn check_topology(&self) -> Result<(), MeshError> {
        let mut ids: HashMap<[u64; 3], usize> = HashMap::new();
        let welded: Vec<usize> = self
            .vertices
            .iter()
            .map(|v| {
                let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect();
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (welded[t[k]], welded[t[(k + 1) % 3]]);
                if a == b {
                    continue;
                }
                *edges.entry((a, b)).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &edges {
            if count > 1 {
                return Err(MeshError::Open(format!(
                    "edge ({a}, {b}) is traversed {count} times in the same direction; orientation is inconsistent"
                )));
            }
            if edges.get(&(b, a)).copied().unwrap_or(0) != 1 {
                return Err(MeshError::Open(format!("edge ({a}, {b}) has no opposite edge")));
            }
        }
        Ok(())
    }
}

/// Loads the `v` / `f` subset of Wavefront OBJ. Faces with more than three
/// vertices are fan-triangulated; texture and normal indices are ignored.
pub fn load_mesh(text: &str) -> Result<TriMesh, MeshError> {
    let mut mesh = TriMesh::default();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<&str> = parts.collect();
                if coords.len() < 3 || coords.len() > 4 {
                    return Err(MeshError::Malformed {
                        line,
                        message: format!("vertex needs 3 coordinates, found {}", coords.len()),
                    });
                }
                let mut v = [0.0; 3];
                for (slot, c) in v.iter_mut().zip(&coords) {
                    *slot = c
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| MeshError::Malformed {
                            line,
                            message: format!("non-numeric vertex coordinate {c:?}"),
                        })?;
                }
                mesh.vertices.push(Vector3::from(v));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for token in parts {
                    let first = token.split('/').next().unwrap_or("");
                    let value: i64 = first.parse().map_err(|_| MeshError::Malformed {
                        line,
                        message: format!("bad face index {token:?}"),
                    })?;
                    let resolved = if value < 0 {
                        mesh.vertices.len() as i64 + value + 1
                    } else {
                        value
                    };
                    if resolved <= 0 {
                        return Err(MeshError::Malformed {
                            line,
                            message: format!("face index {value} is out of range (indices are 1-based)"),
                        });
                    }
                    idx.push(resolved);
                }
                if idx.len() < 3 {
                    return Err(MeshError::Malformed {
                        line,
                        message: format!("face needs at least 3 vertices, found {}", idx.len()),
                    });
                }
                faces.push((line, idx));
            }
            _ => {}
        }
    }
    let n = mesh.vertices.len() as i64;
    for (line, idx) in faces {
        if let Some(bad) = idx.iter().find(|&&v| v > n) {
            return Err(MeshError::Malformed {
                line,
                message: format!("face index {bad} exceeds vertex count {n}"),
            });
        }
        let idx: Vec<usize> = idx.into_iter().map(|v| (v - 1) as usize).collect();
        for k in 1..idx.len() - 1 {
            mesh.triangles.push([idx[0], idx[k], idx[k + 1]]);
        }
    }
    Ok(mesh)
}

pub fn write_mesh(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {:?} {:?} {:?}\n", v.x, v.y, v.z));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeProperties {
    pub volume: f64,
    pub centroid: Vector3<f64>,
    /// Unit-density inertia about the centroid, mesh axes.
    pub inertia: Matrix3<f64>,
}

/// Signed volume without closedness checks.
pub fn signed_volume(mesh: &TriMesh) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.vertices[i]);
            a.dot(&b.cross(&c)) / 6.0
        })
        .sum()
}

pub fn volume_properties(mesh: &TriMesh) -> Result<VolumeProperties, MeshError> {
    let mut volume = 0.0;
    let mut first = Vector3::zeros();
    let mut second = Matrix3::zeros();
    for t in &mesh.triangles {
        let [a, b, c] = t.map(|i| mesh.vertices[i]);
        let det = a.dot(&b.cross(&c));
        let sum = a + b + c;
        volume += det / 6.0;
        first += det * sum;
        second += (det / 120.0)
            * (a * a.transpose() + b * b.transpose() + c * c.transpose() + sum * sum.transpose());
    }

    let bbox = mesh.bounding_box_volume();
    if bbox <= 0.0 || volume.abs() <= CLOSEDNESS_TOLERANCE * bbox {
        return Err(MeshError::Open(format!(
            "signed volume {volume:e} is negligible against bounding box volume {bbox:e}"
        )));
    }
    mesh.check_topology()?;
    if volume < 0.0 {
        return Err(MeshError::Inverted(volume));
    }

    let centroid = first / (24.0 * volume);
    let central = second - volume * centroid * centroid.transpose();
    let inertia = Matrix3::identity() * central.trace() - central;
    Ok(VolumeProperties {
        volume,
        centroid,
        inertia,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimitiveKind {
    Cuboid,
    Cylinder,
    Sphere,
}

impl PrimitiveKind {
    pub fn parse(text: &str) -> Option<Self> {
        match text.to_ascii_lowercase().as_str() {
            "cuboid" | "box" => Some(PrimitiveKind::Cuboid),
            "cylinder" => Some(PrimitiveKind::Cylinder),
            "sphere" => Some(PrimitiveKind::Sphere),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PrimitiveKind::Cuboid => "cuboid",
            PrimitiveKind::Cylinder => "cylinder",
            PrimitiveKind::Sphere => "sphere",
        }
    }

    /// Number of dimensions: cuboid (x, y, z), cylinder (radius, height),
    /// sphere (radius).
    pub fn dimension_count(&self) -> usize {
        match self {
            PrimitiveKind::Cuboid => 3,
            PrimitiveKind::Cylinder => 2,
            PrimitiveKind::Sphere => 1,
        }
    }

    /// Axis-aligned extents of the primitive with the given dimensions.
    pub fn extents(&self, dims: &[f64]) -> Vector3<f64> {
        match self {
            PrimitiveKind::Cuboid => Vector3::new(dims[0], dims[1], dims[2]),
            PrimitiveKind::Cylinder => Vector3::new(2.0 * dims[0], 2.0 * dims[0], dims[1]),
            PrimitiveKind::Sphere => Vector3::repeat(2.0 * dims[0]),
        }
    }

    /// Unit-extent mesh file name used in exported visuals.
    pub fn unit_mesh_name(&self) -> &'static str {
        match self {
            PrimitiveKind::Cuboid => "unit_cuboid.obj",
            PrimitiveKind::Cylinder => "unit_cylinder.obj",
            PrimitiveKind::Sphere => "unit_sphere.obj",
        }
    }

    /// Mesh whose bounding box is the unit cube centred at the origin.
    pub fn unit_mesh(&self) -> TriMesh {
        let dims: &[f64] = match self {
            PrimitiveKind::Cuboid => &[1.0, 1.0, 1.0],
            PrimitiveKind::Cylinder => &[0.5, 1.0],
            PrimitiveKind::Sphere => &[0.5],
        };
        make_primitive(*self, dims).expect("unit dimensions are valid")
    }
}

/// Closed, outward-oriented primitive centred at the origin. Cylinders run
/// along Z with [`DEFAULT_CYLINDER_SLICES`]; spheres are icospheres with
/// [`DEFAULT_SPHERE_SUBDIVISIONS`].
pub fn make_primitive(kind: PrimitiveKind, dims: &[f64]) -> Result<TriMesh, MeshError> {
    if dims.len() != kind.dimension_count() {
        return Err(MeshError::DimensionCount {
            kind: kind.as_str(),
            expected: kind.dimension_count(),
            found: dims.len(),
        });
    }
    if let Some(&bad) = dims.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
        return Err(MeshError::NonPositiveDimension(bad));
    }
    Ok(match kind {
        PrimitiveKind::Cuboid => cuboid(dims[0], dims[1], dims[2]),
        PrimitiveKind::Cylinder => cylinder(dims[0], dims[1], DEFAULT_CYLINDER_SLICES),
        PrimitiveKind::Sphere => icosphere(dims[0], DEFAULT_SPHERE_SUBDIVISIONS),
    })
}

pub fn cuboid(x: f64, y: f64, z: f64) -> TriMesh {
    let h = Vector3::new(x, y, z) / 2.0;
    let vertices = (0..8)
        .map(|i| {
            Vector3::new(
                if i & 1 == 0 { -h.x } else { h.x },
                if i & 2 == 0 { -h.y } else { h.y },
                if i & 4 == 0 { -h.z } else { h.z },
            )
        })
        .collect();
    let triangles = vec![
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 7], [4, 7, 6], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 7], [2, 7, 3], // +y
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 7], [1, 7, 5], // +x
    ];
    TriMesh { vertices, triangles }
}

pub fn cylinder(radius: f64, height: f64, slices: usize) -> TriMesh {
    let slices = slices.max(3);
    let half = height / 2.0;
    let mut vertices = Vec::with_capacity(2 * slices + 2);
    for i in 0..slices {
        let angle = std::f64::consts::TAU * i as f64 / slices as f64;
        let (s, c) = angle.sin_cos();
        vertices.push(Vector3::new(radius * c, radius * s, -half));
        vertices.push(Vector3::new(radius * c, radius * s, half));
    }
    let bottom = vertices.len();
    vertices.push(Vector3::new(0.0, 0.0, -half));
    let top = vertices.len();
    vertices.push(Vector3::new(0.0, 0.0, half));

    let mut triangles = Vec::with_capacity(4 * slices);
    for i in 0..slices {
        let j = (i + 1) % slices;
        let (b0, t0, b1, t1) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        triangles.push([b0, b1, t1]);
        triangles.push([b0, t1, t0]);
        triangles.push([bottom, b1, b0]);
        triangles.push([top, t0, t1]);
    }
    TriMesh { vertices, triangles }
}

pub fn icosphere(radius: f64, subdivisions: usize) -> TriMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) / 2.0).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    for v in &mut vertices {
        *v *= radius;
    }
    TriMesh { vertices, triangles }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassPolicy {
    /// kg/m³, integrated over the scaled mesh volume.
    MeanDensity(f64),
    UserValues {
        mass: f64,
        com: Vector3<f64>,
        inertia: Matrix3<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    pub mass: f64,
    pub com: Vector3<f64>,
    /// About the CoM.
    pub inertia: Matrix3<f64>,
}

pub fn check_symmetric(inertia: &Matrix3<f64>) -> Result<(), MeshError> {
    let scale = inertia.amax();
    let asymmetry = (inertia - inertia.transpose()).amax();
    if asymmetry > 1e-9 * scale {
        return Err(MeshError::AsymmetricInertia { asymmetry });
    }
    Ok(())
}

pub fn apply_mass_policy(
    policy: &MassPolicy,
    mesh: Option<&TriMesh>,
    scale: &Vector3<f64>,
) -> Result<MassProperties, MeshError> {
    match *policy {
        MassPolicy::MeanDensity(density) => {
            let mesh = mesh.ok_or(MeshError::MissingMesh)?;
            let props = volume_properties(&mesh.scaled(scale))?;
            Ok(MassProperties {
                mass: density * props.volume,
                com: props.centroid,
                inertia: density * props.inertia,
            })
        }
        MassPolicy::UserValues { mass, com, inertia } => {
            check_symmetric(&inertia)?;
            Ok(MassProperties { mass, com, inertia })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const UNIT_CUBE_OBJ: &str = "\
v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1
f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\nf 1 2 6\nf 1 6 5
f 4 8 7\nf 4 7 3\nf 1 5 8\nf 1 8 4\nf 2 3 7\nf 2 7 6
";

    #[test]
    fn loads_unit_cube() {
        let m = load_mesh(UNIT_CUBE_OBJ).unwrap();
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.triangles.len(), 12);
        let p = volume_properties(&m).unwrap();
        assert_relative_eq!(p.volume, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.centroid, Vector3::repeat(0.5), epsilon = 1e-12);
        let expected = Matrix3::from_diagonal_element(1.0 / 6.0);
        assert_relative_eq!(p.inertia, expected, epsilon = 1e-12);
    }

    #[test]
    fn quads_are_fanned() {
        let m = load_mesh("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3 4/4/4\n").unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3]]);
        let m = load_mesh("v 0 0 0\nv 1 0 0\nv 1 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2]]);
    }

    #[test]
    fn malformed_inputs() {
        for (text, line) in [
            ("v 0 0 0\nv 1 0 0\nv 1 1 0\nf 0 1 2\n", 4),
            ("v 0 0 0\nv 1 0 0\nv 1 1 0\nf 1 2 4\n", 4),
            ("v 0 zero 0\n", 1),
            ("v 0 0\n", 1),
            ("v 0 0 0\nf 1 1\n", 2),
            ("v 0 0 0\nf a b c\n", 2),
        ] {
            match load_mesh(text) {
                Err(MeshError::Malformed { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn reversed_winding_is_detected() {
        let cube = cuboid(1.0, 2.0, 3.0);
        assert!(signed_volume(&cube) > 0.0);
        assert_relative_eq!(signed_volume(&cube.reversed()), -6.0, epsilon = 1e-12);
        assert_eq!(volume_properties(&cube.reversed()).unwrap_err().code(), Code::OpenMesh);
    }

    #[test]
    fn open_and_flipped_meshes_fail() {
        let mut open = cuboid(1.0, 1.0, 1.0);
        open.triangles.pop();
        assert!(matches!(volume_properties(&open), Err(MeshError::Open(_))));

        let mut flipped = cuboid(1.0, 1.0, 1.0);
        let [a, b, c] = flipped.triangles[0];
        flipped.triangles[0] = [a, c, b];
        assert!(matches!(volume_properties(&flipped), Err(MeshError::Open(_))));

        let flat = TriMesh {
            vertices: vec![Vector3::zeros(), Vector3::x(), Vector3::y()],
            triangles: vec![[0, 1, 2], [0, 2, 1]],
        };
        assert!(matches!(volume_properties(&flat), Err(MeshError::Open(_))));
    }

    #[test]
    fn primitives_are_closed() {
        for (kind, dims) in [
            (PrimitiveKind::Cuboid, vec![1.0, 2.0, 0.5]),
            (PrimitiveKind::Cylinder, vec![0.3, 1.0]),
            (PrimitiveKind::Sphere, vec![0.7]),
        ] {
            let m = make_primitive(kind, &dims).unwrap();
            let p = volume_properties(&m).unwrap();
            assert!(p.volume > 0.0);
            assert_relative_eq!(p.centroid, Vector3::zeros(), epsilon = 1e-12);
        }
    }

    #[test]
    fn primitive_dimension_errors() {
        assert_eq!(
            make_primitive(PrimitiveKind::Cuboid, &[1.0, 0.0, 1.0]).unwrap_err(),
            MeshError::NonPositiveDimension(0.0)
        );
        assert_eq!(
            make_primitive(PrimitiveKind::Sphere, &[-1.0]).unwrap_err().code(),
            Code::NonPositiveDimension
        );
        assert!(make_primitive(PrimitiveKind::Cylinder, &[1.0]).is_err());
    }

    #[test]
    fn unit_meshes_fit_unit_box() {
        for kind in [PrimitiveKind::Cuboid, PrimitiveKind::Cylinder, PrimitiveKind::Sphere] {
            let m = kind.unit_mesh();
            let max = m.vertices.iter().map(|v| v.amax()).fold(0.0, f64::max);
            assert_relative_eq!(max, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn mean_density_policy() {
        let cube = cuboid(1.0, 1.0, 1.0);
        let p = apply_mass_policy(&MassPolicy::MeanDensity(1000.0), Some(&cube), &Vector3::repeat(1.0))
            .unwrap();
        assert_relative_eq!(p.mass, 1000.0, epsilon = 1e-9);

        let p = apply_mass_policy(
            &MassPolicy::MeanDensity(1000.0),
            Some(&cube),
            &Vector3::new(2.0, 1.0, 1.0),
        )
        .unwrap();
        assert_relative_eq!(p.mass, 2000.0, epsilon = 1e-9);

        let p = apply_mass_policy(&MassPolicy::MeanDensity(0.0), Some(&cube), &Vector3::repeat(1.0))
            .unwrap();
        assert_eq!(p.mass, 0.0);
        assert_eq!(p.inertia, Matrix3::zeros());

        assert_eq!(
            apply_mass_policy(&MassPolicy::MeanDensity(1.0), None, &Vector3::repeat(1.0)).unwrap_err(),
            MeshError::MissingMesh
        );
    }

    #[test]
    fn user_values_pass_through() {
        let policy = MassPolicy::UserValues {
            mass: 5.0,
            com: Vector3::zeros(),
            inertia: Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)),
        };
        let p = apply_mass_policy(&policy, None, &Vector3::repeat(1.0)).unwrap();
        assert_eq!(p.mass, 5.0);
        assert_eq!(p.inertia, Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0)));

        let mut skew = Matrix3::identity();
        skew[(0, 1)] = 0.1;
        let bad = MassPolicy::UserValues {
            mass: 1.0,
            com: Vector3::zeros(),
            inertia: skew,
        };
        assert_eq!(
            apply_mass_policy(&bad, None, &Vector3::repeat(1.0)).unwrap_err().code(),
            Code::AsymmetricUserInertia
        );
    }

    #[test]
    fn write_then_load() {
        let m = icosphere(1.0, 1);
        assert_eq!(load_mesh(&write_mesh(&m)).unwrap(), m);
    }
}

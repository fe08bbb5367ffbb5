use nalgebra::{Matrix3, Vector3};

use crate::kinematics::KinematicModel;

/// World placement of a segment frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldFrame {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl WorldFrame {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, local: &Vector3<f64>) -> Vector3<f64> {
        self.translation + self.rotation * local
    }
}

/// Frames of every segment with all joint variables at zero, indexed by id;
/// entry 0 is ROOT.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseFrames {
    names: Vec<String>,
    frames: Vec<WorldFrame>,
}

impl PoseFrames {
    pub fn root(&self) -> &WorldFrame {
        &self.frames[0]
    }

    pub fn by_id(&self, id: usize) -> Option<&WorldFrame> {
        self.frames.get(id)
    }

    pub fn get(&self, name: &str) -> Option<&WorldFrame> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.frames[i + 1])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &WorldFrame)> {
        self.names.iter().map(String::as_str).zip(&self.frames[1..])
    }
}

pub fn reference_pose_frames(model: &KinematicModel) -> PoseFrames {
    let mut frames = vec![WorldFrame::identity()];
    for seg in &model.segments {
        let parent = frames
            .get(seg.parent_id)
            .copied()
            .unwrap_or_else(WorldFrame::identity);
        frames.push(WorldFrame {
            rotation: parent.rotation * seg.joint_frame.rotation,
            translation: parent.apply(&seg.joint_frame.translation),
        });
    }
    PoseFrames {
        names: model.segments.iter().map(|s| s.name.clone()).collect(),
        frames,
    }
}

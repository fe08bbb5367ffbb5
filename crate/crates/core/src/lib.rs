//! Builds scaled, subject-specific rigid multibody models of humans and
//! objects from plain-text descriptions and exports them as Lua model files.
//!
//! The pipeline reads an environment file, scales a human model from
//! anthropometry and a scaling table, builds object models from declarative
//! setups, attaches points, contact and loop constraints and markers,
//! validates the result and writes Lua, JSON and a preview scene.

pub mod anthro;
pub mod diag;
pub mod dictionary;
pub mod export;
pub mod formats;
pub mod kinematics;
pub mod mesh;
pub mod pipeline;

pub use diag::{Code, Diagnostic, Parsed, Report, Severity};

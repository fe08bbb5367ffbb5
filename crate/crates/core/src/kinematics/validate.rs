use std::collections::BTreeSet;

use nalgebra::SymmetricEigen;

use crate::diag::{Code, Diagnostic, Report};
use crate::kinematics::{Functionality, KinematicModel, ROOT};
use crate::mesh::check_symmetric;

const PSD_TOLERANCE: f64 = 1e-12;

fn invalid(location: &str, message: String) -> Diagnostic {
    Diagnostic::error(Code::InvalidModel, message).located(location.to_owned())
}

/// Error diagnostic naming the capability-matrix row that `kind` lacks.
pub fn capability_violation(f: Functionality, model: &KinematicModel) -> Diagnostic {
    Diagnostic::error(
        Code::CapabilityViolation,
        format!(
            "{} is not available for {} models (model {:?})",
            f.label(),
            model.kind,
            model.name
        ),
    )
    .located(f.label())
}

/// Checks the capability matrix and the structural invariants of `model`.
pub fn validate_model(model: &KinematicModel) -> Report {
    let mut report = Report::new();

    for f in &model.features.0 {
        if !f.available_for(model.kind) {
            report.push(capability_violation(*f, model));
        }
    }

    let mut names = BTreeSet::new();
    let mut markers = BTreeSet::new();
    for (i, seg) in model.segments.iter().enumerate() {
        let at = seg.name.as_str();
        if seg.id != i + 1 {
            report.push(invalid(at, format!("segment id {} at position {}", seg.id, i + 1)));
        }
        if seg.parent_id >= seg.id {
            report.push(invalid(
                at,
                format!("parent id {} is not below own id {}", seg.parent_id, seg.id),
            ));
        } else {
            let expected = match seg.parent_id {
                0 => ROOT,
                p => model.segments[p - 1].name.as_str(),
            };
            if seg.parent_name != expected {
                report.push(invalid(
                    at,
                    format!("parent name {:?} does not match id {}", seg.parent_name, seg.parent_id),
                ));
            }
        }
        if !names.insert(seg.name.as_str()) {
            report.push(
                Diagnostic::error(
                    Code::DuplicateSegmentName,
                    format!("segment {:?} appears more than once", seg.name),
                )
                .located(at.to_owned()),
            );
        }
        if !(seg.mass >= 0.0 && seg.mass.is_finite()) {
            report.push(invalid(at, format!("mass {} is negative or not finite", seg.mass)));
        }
        if seg.inertia.iter().any(|v| !v.is_finite()) {
            report.push(invalid(at, "inertia has non-finite entries".into()));
        } else if check_symmetric(&seg.inertia).is_err() {
            report.push(invalid(at, "inertia is not symmetric".into()));
        } else {
            let scale = seg.inertia.abs().max().max(f64::MIN_POSITIVE);
            let min = SymmetricEigen::new(seg.inertia).eigenvalues.min();
            if min < -PSD_TOLERANCE * scale {
                report.push(invalid(
                    at,
                    format!("inertia is not positive semidefinite (eigenvalue {min})"),
                ));
            }
        }
        for c in &seg.constraints {
            if seg.point(&c.point).is_none() {
                report.push(invalid(
                    at,
                    format!("constraint {}/{} uses unattached point {:?}", c.set, c.subset, c.point),
                ));
            }
        }
        for m in &seg.markers {
            if !markers.insert(m.name.as_str()) {
                report.push(
                    Diagnostic::error(
                        Code::DuplicateMarkerName,
                        format!("marker {:?} is attached more than once", m.name),
                    )
                    .located(at.to_owned()),
                );
            }
        }
    }

    for lc in &model.loop_constraints {
        for end in [&lc.row.predecessor, &lc.row.successor] {
            match model.segment(&end.body) {
                None => report.push(
                    Diagnostic::warning(
                        Code::UnresolvedLoop,
                        format!(
                            "loop set {:?}: body {:?} is not part of {:?}; the row is kept for the combined export",
                            lc.set, end.body, model.name
                        ),
                    )
                    .located(lc.set.clone()),
                ),
                Some(seg) if seg.point(&end.point).is_none() => report.push(
                    Diagnostic::error(
                        Code::UnresolvedLoop,
                        format!(
                            "loop set {:?}: point {:?} is not attached to {:?}",
                            lc.set, end.point, end.body
                        ),
                    )
                    .located(lc.set.clone()),
                ),
                Some(_) => {}
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::ModelKind;

    #[test]
    fn empty_models_are_valid() {
        let m = KinematicModel::new("m", ModelKind::Human);
        assert!(validate_model(&m).is_empty());
    }

    #[test]
    fn every_matrix_row_is_enforced() {
        for kind in [ModelKind::Human, ModelKind::Object] {
            for f in Functionality::ALL {
                let mut m = KinematicModel::new("m", kind);
                m.features.insert(f);
                let report = validate_model(&m);
                assert_eq!(report.contains(Code::CapabilityViolation), !f.available_for(kind));
                for d in report.iter() {
                    assert_eq!(d.location.as_deref(), Some(f.label()));
                }
            }
        }
    }
}

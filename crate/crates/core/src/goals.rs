//! The four builtin two-fold goal shapes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloth::{create_cloth, rasterize_topdown, ClothError, ClothSpec, GridSpec};
use crate::fold::{execute_sequence, FoldAction, FoldError, FoldParams};
use crate::mask::Mask;

#[derive(Debug, Error)]
pub enum GoalError {
    #[error("unknown goal id {0:?}")]
    UnknownGoal(String),
    #[error(transparent)]
    Cloth(#[from] ClothError),
    #[error(transparent)]
    Fold(#[from] FoldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GoalId {
    G1,
    G2,
    G3,
    G4,
}

impl GoalId {
    pub const ALL: [GoalId; 4] = [GoalId::G1, GoalId::G2, GoalId::G3, GoalId::G4];
}

impl fmt::Display for GoalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GoalId::G1 => "G1",
            GoalId::G2 => "G2",
            GoalId::G3 => "G3",
            GoalId::G4 => "G4",
        };
        f.write_str(s)
    }
}

impl FromStr for GoalId {
    type Err = GoalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "G1" => Ok(GoalId::G1),
            "G2" => Ok(GoalId::G2),
            "G3" => Ok(GoalId::G3),
            "G4" => Ok(GoalId::G4),
            _ => Err(GoalError::UnknownGoal(s.to_string())),
        }
    }
}

/// One scripted fold in normalized cloth coordinates: (0,0) is the
/// south-west cloth corner, (1,1) the north-east one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScriptedFold {
    pub pick: [f64; 2],
    pub place: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub id: GoalId,
    pub name: String,
    pub script: Vec<ScriptedFold>,
    pub description: String,
}

impl GoalSpec {
    /// Script actions in workspace meters for a cloth centered on `grid`.
    pub fn actions(&self, cloth: &ClothSpec, grid: &GridSpec) -> Vec<FoldAction> {
        self.script
            .iter()
            .map(|f| {
                FoldAction::new(
                    grid.cloth_point(cloth.side_length, f.pick),
                    grid.cloth_point(cloth.side_length, f.place),
                )
            })
            .collect()
    }
}

fn goal(id: GoalId, name: &str, script: [([f64; 2], [f64; 2]); 2], description: &str) -> GoalSpec {
    GoalSpec {
        id,
        name: name.to_string(),
        script: script.iter().map(|&(pick, place)| ScriptedFold { pick, place }).collect(),
        description: description.to_string(),
    }
}

pub fn builtin_goals() -> Vec<GoalSpec> {
    vec![
        goal(
            GoalId::G1,
            "quarter",
            [([0.0, 0.5], [1.0, 0.5]), ([0.75, 0.0], [0.75, 1.0])],
            "Fold the west half onto the east half, then fold the south half of that strip north.",
        ),
        goal(
            GoalId::G2,
            "diagonal-half",
            [([0.0, 0.0], [1.0, 1.0]), ([1.0, 1.0], [0.5, 0.5])],
            "Fold the south-west corner onto the north-east corner, then fold that corner in to the center.",
        ),
        goal(
            GoalId::G3,
            "half-tuck",
            [([0.0, 0.5], [1.0, 0.5]), ([1.0, 1.0], [0.7, 0.7])],
            "Fold the west half onto the east half, then tuck the north-east corner inward.",
        ),
        goal(
            GoalId::G4,
            "two-corners",
            [([0.0, 0.0], [0.5, 0.5]), ([1.0, 1.0], [0.5, 0.5])],
            "Fold two opposite corners in to the center.",
        ),
    ]
}

pub fn builtin_goal(id: GoalId) -> GoalSpec {
    builtin_goals()
        .into_iter()
        .find(|g| g.id == id)
        .expect("every id has a builtin goal")
}

/// Folds a fresh flat cloth through the goal script and rasterizes the
/// settled result.
pub fn render_goal(spec: &GoalSpec, cloth: &ClothSpec, params: &FoldParams, grid: &GridSpec) -> Result<Mask, GoalError> {
    grid.validate()?;
    let flat = create_cloth(cloth, grid.center())?;
    let actions = spec.actions(cloth, grid);
    for a in &actions {
        a.validate(Some(grid))?;
    }
    let folded = execute_sequence(&flat, cloth, &actions, params)?;
    Ok(rasterize_topdown(&folded, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_distinct_two_fold_goals() {
        let goals = builtin_goals();
        assert_eq!(goals.len(), 4);
        for (g, id) in goals.iter().zip(GoalId::ALL) {
            assert_eq!(g.id, id);
            assert_eq!(g.script.len(), 2);
        }
        let grid = GridSpec::default();
        let cloth = ClothSpec::default();
        for g in &goals {
            for a in g.actions(&cloth, &grid) {
                a.validate(Some(&grid)).unwrap();
            }
        }
    }

    #[test]
    fn ids_parse_and_print() {
        for id in GoalId::ALL {
            assert_eq!(id.to_string().parse::<GoalId>().unwrap(), id);
        }
        assert_eq!("g3".parse::<GoalId>().unwrap(), GoalId::G3);
        assert!("G5".parse::<GoalId>().is_err());
    }
}

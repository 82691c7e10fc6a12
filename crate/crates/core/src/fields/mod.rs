//! Grids, trial functions and the named test families.

mod families;
mod grid;
mod io;
pub mod suite;
mod trial;

pub use families::{
    boundary_cutoff, bubble, bubble_profile, dilate, far_cutoff, translate_lateral, translated_cutoff_family, undilate,
    unit_ball_bump, wall_family_member, UnitBallProfile,
};
pub use grid::Grid;
pub use io::{read_csv, write_csv};
pub use trial::TrialFunction;

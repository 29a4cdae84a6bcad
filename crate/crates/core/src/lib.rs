//! Numerical laboratory for a compact non-convex ancient curve shortening
//! flow built from the Yin-Yang rotating soliton and a Grim Reaper tip.

pub mod construct;
pub mod curve;
pub mod barrier;
pub mod error;
pub mod flow;
pub mod io;
pub mod monitor;
pub mod ode;
pub mod reaper;
pub mod roots;
pub mod vec2;
pub mod yinyang;

pub use curve::PlaneCurve;
pub use error::{Error, Result};
pub use vec2::Vec2;
pub use yinyang::YinYangProfile;

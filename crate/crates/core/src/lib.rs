//! Agents and worlds as Turing machines exchanging letters, played in
//! games scored victory, draw or loss.
//!
//! * [`machine`]: world and agent machines, their text format and stepping.
//! * [`game`]: caps, games, lives and the success measure.
//! * [`tree`]: exact game trees and the Max-Sum solver.
//! * [`agents`]: the policy trait and reference agents.
//! * [`worldspace`]: counting, enumerating and sampling world machines.
//! * [`transcript`]: the life transcript format.
//! * [`harness`]: multi-world evaluation with seeded, order-independent runs.

pub mod agents;
pub mod alphabet;
pub mod game;
pub mod harness;
pub mod machine;
pub mod tape;
pub mod transcript;
pub mod tree;
pub mod worldspace;


/// Exact rational used for probabilities and success values.
pub type Rational = num_rational::BigRational;

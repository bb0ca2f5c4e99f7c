//! Shared test support: an independent tuple-difference oracle, seeded
//! random schema histories, and the scripted fixture repository.

pub mod corpus;
pub mod fixture;
pub mod oracle;
pub mod random;

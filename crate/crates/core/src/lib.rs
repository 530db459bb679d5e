pub mod angle;
pub mod cli;
pub mod boundary;
pub mod dynamics;
pub mod gamma;
pub mod geometry;
pub mod linearization;
pub mod render;
pub mod rotation;
pub mod serde_complex;
pub mod sphere;
pub mod verify;

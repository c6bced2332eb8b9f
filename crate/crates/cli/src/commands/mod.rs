pub mod common;
pub mod entangle;
pub mod error;
pub mod sweep;
pub mod thermal;
pub mod verify;

pub mod arithmetic;
pub mod config;
pub mod drinfeld;
pub mod eisenstein;
pub mod error;
pub mod expo;
pub mod field;
pub mod lattice;
pub mod modspace;
pub mod series;
pub mod verify;

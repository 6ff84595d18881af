//! Search and classification of partial difference sets in small groups
//! given by Cayley tables.

pub mod analysis;
pub mod aut;
pub mod bitset;
pub mod character;
pub mod construct;
pub mod coset_db;
pub mod error;
pub mod graph6;
pub mod group;
pub mod io;
pub mod record;
pub mod ring;
pub mod search;
pub mod srg;

pub use error::{Error, Result};
pub use group::GroupTable;
pub use record::PdsRecord;
pub use ring::PdsParams;

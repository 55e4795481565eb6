pub mod algebra;
pub mod displays;
pub mod error;
pub mod frames;
pub mod group;
pub mod ideal;
pub mod mat;
pub mod pd;
pub mod pd_witt;
pub mod ring;
pub mod rigidity;
pub mod table;
pub mod witt;

pub use algebra::{CRing, Integers};
pub use error::{Error, Result};
pub use group::Datum;
pub use ideal::Ideal;
pub use mat::Mat;
pub use pd::{PdIdeal, PdRule, ValidationReport};
pub use pd_witt::PdWitt;
pub use rigidity::BiWitt;
pub use ring::{Elem, Ring, RingSpec};
pub use table::{TableRing, Tabulated};
pub use witt::{Strategy, Witt, WittRing, WittVec};

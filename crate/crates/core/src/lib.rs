pub mod cli;
pub mod coleman;
pub mod elliptic;
pub mod error;
pub mod iwasawa;
pub mod lubin_tate;
pub mod measures;
pub mod padic;
pub mod quotient;
pub mod ring;
pub mod series;

pub use error::{Error, Result};
pub use measures::{GroupTag, Measure};
pub use lubin_tate::{FormalGroup, TorsionTower, Variant};
pub use padic::{RingElem, RingKind, RingSpec, Valuation};
pub use series::{ScaledSeries, TruncSeries, WeierstrassData};

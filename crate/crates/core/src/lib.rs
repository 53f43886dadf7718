//! Flash codes: rewriting codes that store `k` information bits in `n`
//! multilevel cells and absorb as many single-bit writes as possible before a
//! block erasure is required.
//!
//! Three constructions are provided behind the common [`FlashCode`] interface:
//!
//! - [`indexless`]: one bit per block of `k` cells; the bit value is the block
//!   parity and the bit identity is carried by the cyclic order in which the
//!   cells are raised.
//! - [`multistage`]: the index-less code followed by recursive stages with
//!   half-size parity blocks and explicit index blocks, either written as
//!   base-`q` numerals or stacked in binary across level windows.
//! - [`constant_rate`]: a phase scheme for `k/n` constant that logs flipped
//!   bit indices and snapshots the information vector between phases.
//!
//! [`analysis`] holds the closed-form deficiency bounds, an exhaustive
//! adversarial oracle and a seeded simulator.
//!
//! ```
//! use flashcode::{Codec, CodeParams, EncodeOutcome, FlashCode, Scheme};
//!
//! let code = Codec::new(CodeParams::new(64, 4, 3, Scheme::MultistageBaseQ)?)?;
//! let mut state = code.init();
//! if let EncodeOutcome::Next(next) = code.encode(2, &state)? {
//!     state = next;
//! }
//! assert_eq!(code.decode(&state)?.get(2), 1);
//! # Ok::<(), flashcode::CodeError>(())
//! ```

pub mod analysis;
pub mod cell;
pub mod cli;
pub mod codec;
pub mod constant_rate;
pub mod error;
pub mod indexless;
pub mod layout;
pub mod multistage;
pub mod numeral;
pub mod params;

pub use cell::{BlockRole, BlockStatus, BlockView, CellState, EncodeOutcome, InfoVector};
pub use codec::{Codec, FlashCode};
pub use error::CodeError;
pub use layout::Layout;
pub use params::{CodeParams, Scheme};

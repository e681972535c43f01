//! Mediated cheap talk with two informed senders and a receiver choosing
//! between actions `0` and `1`.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
    }};
}

pub mod error;
pub mod game;
pub mod generate;
pub mod implementability;
pub mod io;
pub mod mediator;
pub mod oracle;
pub mod receiver_opt;
pub mod report;
pub mod sender1_opt;
pub mod sender_opt;

pub use error::{Error, Result, Witness};
pub use game::{Agent, GameInstance, Policy, Preference, SenderClass, State, Utilities};
pub use report::DesignReport;

//! File formats and session state behind the command-line tool and the
//! HTTP service.

pub mod formats;
pub mod session;

pub use formats::{
    complex_json, load_csv, load_json, parse_document, save_json, ComplexDocument, CsvLoad, CsvOptions,
    FormatError, SimplexEntry,
};
pub use session::{
    apply_params, default_network, ParamsUpdate, SessionState, SessionStore, SharedSession,
};

//! Identifier newtypes shared across the crate.
//!
//! Every domain object is referenced by a dedicated id type so that a
//! component id can never be confused with a function id or an evidence
//! entry id at a call site. All ids are plain strings with lexicographic
//! ordering, which is what makes iteration over `BTreeMap`-keyed
//! collections deterministic.

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! define_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

define_id! {
    /// Identifier of a hardware or software component in the system model.
    ComponentId
}

define_id! {
    /// Identifier of a system function (sensing, detection, ...).
    FunctionId
}

define_id! {
    /// Identifier of an operating mode (e.g. `mode1`).
    ModeId
}

define_id! {
    /// Identifier of an assumption row in the evidence store.
    AssumptionId
}

define_id! {
    /// Identifier of an evidence entry (goal id in the store, e.g. `G2`).
    EntryId
}

define_id! {
    /// Identifier of an evidence evaluation tree.
    TreeId
}

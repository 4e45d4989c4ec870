//! Symbolic identifiers used throughout the toolkit.

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! symbol {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
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
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

symbol!(
    /// Identifier of a datum moving through the adapter.
    DataId
);
symbol!(
    /// Identifier of an adapter port.
    PortId
);
symbol!(
    /// Identifier of a storage element in a generated architecture.
    StorageId
);

/// Clock cycle index.
pub type Cycle = u64;

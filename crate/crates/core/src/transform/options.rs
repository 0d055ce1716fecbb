use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};

use crate::rules::Catalog;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OptionsError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("`{0}` cannot start an identifier")]
    BadPrefix(String),
}

/// Which rules a transformation may use and how generated names look.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformOptions {
    /// `None` enables every catalog rule.
    enabled: Option<BTreeSet<String>>,
    max_nesting: Option<usize>,
    fresh_prefix: String,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            enabled: None,
            max_nesting: None,
            fresh_prefix: "_bb".to_string(),
        }
    }
}

impl TransformOptions {
    /// All rules, unlimited nesting, prefix `_bb`.
    pub fn new() -> Self {
        Self::default()
    }

    /// Restricts the transformation to the listed rule ids.
    pub fn with_rules<'a>(
        mut self,
        ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, OptionsError> {
        let known = Catalog::standard();
        let mut set = BTreeSet::new();
        for id in ids {
            if known.get(id).is_none() {
                return Err(OptionsError::UnknownRule(id.to_string()));
            }
            set.insert(id.to_string());
        }
        self.enabled = Some(set);
        Ok(self)
    }

    /// At most `n` rules are folded into any one site.
    pub fn with_max_nesting(mut self, n: usize) -> Self {
        self.max_nesting = Some(n);
        self
    }

    pub fn with_fresh_prefix(mut self, prefix: &str) -> Result<Self, OptionsError> {
        if crate::lang::Ident::new(&alloc::format!("{prefix}0")).is_err() {
            return Err(OptionsError::BadPrefix(prefix.to_string()));
        }
        self.fresh_prefix = prefix.to_string();
        Ok(self)
    }

    pub fn is_enabled(&self, id: &str) -> bool {
        self.enabled.as_ref().is_none_or(|s| s.contains(id))
    }

    pub fn max_nesting(&self) -> Option<usize> {
        self.max_nesting
    }

    pub fn fresh_prefix(&self) -> &str {
        &self.fresh_prefix
    }
}

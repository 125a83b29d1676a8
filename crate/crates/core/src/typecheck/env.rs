use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::TypeAnnot;

/// `Γ`: a finite partial map from names to types. Updates return a new
/// environment, so judgments can hand back either the extended or the outer one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypingEnv {
    bindings: BTreeMap<String, TypeAnnot>,
}

impl TypingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&TypeAnnot> {
        self.bindings.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.bindings.contains_key(x)
    }

    /// `Γ[x ↦ t]`, shadowing any earlier binding of `x`.
    pub fn extend(&self, x: &str, t: TypeAnnot) -> Self {
        let mut out = self.clone();
        out.bindings.insert(x.to_string(), t);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TypeAnnot)> {
        self.bindings.iter()
    }

    /// `dom_I(Γ)`: the names bound to iterable types.
    pub fn iterable_domain(&self) -> Vec<&str> {
        self.bindings.iter().filter(|(_, t)| t.is_iterable()).map(|(x, _)| x.as_str()).collect()
    }

    /// `Γ ⊆ Γ'`: every binding of `self` appears unchanged in `other`.
    pub fn is_sub_env_of(&self, other: &TypingEnv) -> bool {
        self.bindings.iter().all(|(x, t)| other.get(x) == Some(t))
    }
}

impl<'a> FromIterator<(&'a str, TypeAnnot)> for TypingEnv {
    fn from_iter<I: IntoIterator<Item = (&'a str, TypeAnnot)>>(iter: I) -> Self {
        TypingEnv { bindings: iter.into_iter().map(|(x, t)| (x.to_string(), t)).collect() }
    }
}

impl fmt::Display for TypingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}↦{t}")?;
        }
        f.write_str("]")
    }
}

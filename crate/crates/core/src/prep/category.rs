use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four mutually exclusive learner categories used as rule targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Certified,
    OnlyExplored,
    OnlyViewed,
    OnlyRegistered,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Certified,
        Category::OnlyExplored,
        Category::OnlyViewed,
        Category::OnlyRegistered,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Certified => "Certified",
            Category::OnlyExplored => "OnlyExplored",
            Category::OnlyViewed => "OnlyViewed",
            Category::OnlyRegistered => "OnlyRegistered",
        }
    }

    /// Attribute name used on the right-hand side of a rendered rule.
    pub fn attribute_name(self) -> &'static str {
        match self {
            Category::Certified => "certified",
            Category::OnlyExplored => "onlyexplored",
            Category::OnlyViewed => "onlyViewed",
            Category::OnlyRegistered => "onlyregistered",
        }
    }

    /// Derived `only*` attribute names; these may never appear as items.
    pub fn is_reserved_attribute(attribute: &str) -> bool {
        ["onlyexplored", "onlyviewed", "onlyregistered"]
            .iter()
            .any(|r| attribute.eq_ignore_ascii_case(r))
    }

    pub fn parse(s: &str) -> Option<Category> {
        let s = s.trim();
        Category::ALL.into_iter().find(|c| {
            c.name().eq_ignore_ascii_case(s) || c.attribute_name().eq_ignore_ascii_case(s)
        })
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Highest flag wins: certified, then explored, then viewed, then registered.
pub fn derive_category(registered: bool, viewed: bool, explored: bool, certified: bool) -> Result<Category> {
    if !registered {
        return Err(Error::InvalidRecord { row: 0, reason: "registered flag is false".into() });
    }
    Ok(if certified {
        Category::Certified
    } else if explored {
        Category::OnlyExplored
    } else if viewed {
        Category::OnlyViewed
    } else {
        Category::OnlyRegistered
    })
}

/// One counter per category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetCounts(pub [u64; 4]);

impl TargetCounts {
    pub fn one(target: Category) -> Self {
        let mut c = TargetCounts::default();
        c[target] = 1;
        c
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Category, u64)> + '_ {
        Category::ALL.into_iter().map(|c| (c, self[c]))
    }
}

impl Index<Category> for TargetCounts {
    type Output = u64;

    #[inline]
    fn index(&self, c: Category) -> &u64 {
        &self.0[c.index()]
    }
}

impl IndexMut<Category> for TargetCounts {
    #[inline]
    fn index_mut(&mut self, c: Category) -> &mut u64 {
        &mut self.0[c.index()]
    }
}

impl AddAssign for TargetCounts {
    #[inline]
    fn add_assign(&mut self, rhs: TargetCounts) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Add for TargetCounts {
    type Output = TargetCounts;

    fn add(mut self, rhs: TargetCounts) -> TargetCounts {
        self += rhs;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hierarchy() {
        assert_eq!(derive_category(true, false, false, false).unwrap(), Category::OnlyRegistered);
        assert_eq!(derive_category(true, true, false, false).unwrap(), Category::OnlyViewed);
        assert_eq!(derive_category(true, true, true, false).unwrap(), Category::OnlyExplored);
        assert_eq!(derive_category(true, true, true, true).unwrap(), Category::Certified);
        // inconsistent flags resolve upward
        assert_eq!(derive_category(true, false, false, true).unwrap(), Category::Certified);
        assert_eq!(derive_category(true, false, true, false).unwrap(), Category::OnlyExplored);
    }

    #[test]
    fn unregistered_is_invalid() {
        assert!(matches!(derive_category(false, true, true, true), Err(Error::InvalidRecord { .. })));
    }

    #[test]
    fn parse_names() {
        for c in Category::ALL {
            assert_eq!(Category::parse(c.name()), Some(c));
            assert_eq!(Category::parse(c.attribute_name()), Some(c));
        }
        assert_eq!(Category::parse("only_viewed"), None);
        assert!(Category::is_reserved_attribute("Onlyviewed"));
        assert!(!Category::is_reserved_attribute("certified"));
    }
}

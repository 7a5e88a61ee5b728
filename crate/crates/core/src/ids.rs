//! Catalog identifiers of the form `name?key=value&key=value`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogId {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl CatalogId {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, query) = match s.split_once('?') {
            Some((n, q)) => (n, q),
            None => (s, ""),
        };
        if name.is_empty() {
            return Err(Error::Parse(format!("empty catalog name in `{s}`")));
        }
        let mut params = BTreeMap::new();
        for pair in query.split('&').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in `{pair}`")))?;
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Parse(format!("duplicate key `{k}` in `{s}`")));
            }
        }
        Ok(CatalogId { name: name.to_string(), params })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get_parsed(key)?.unwrap_or(default))
    }

    /// Rejects keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Validation(format!("unknown parameter `{k}` for `{}`", self.name))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { '?' } else { '&' })?;
        }
        Ok(())
    }
}

use std::collections::BTreeMap;
use std::str::FromStr;

use dpbandit::Error;

/// `key=value` arguments. Every key must be read before [`KeyValues::finish`].
pub struct KeyValues {
    values: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(args: &[String]) -> Result<Self, Error> {
        let mut values = BTreeMap::new();
        for arg in args {
            let (key, value) =
                arg.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got {arg:?}")))?;
            if values.insert(key.trim().to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("parameter {key:?} given twice")));
            }
        }
        Ok(KeyValues { values })
    }

    pub fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, Error> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| Error::Config(format!("cannot parse {key}={raw}"))),
        }
    }

    pub fn get_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, Error> {
        Ok(self.optional(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T, Error> {
        self.optional(key)?.ok_or_else(|| Error::Config(format!("missing parameter {key}")))
    }

    pub fn finish(self) -> Result<(), Error> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(key) => Err(Error::Config(format!("unknown parameter {key:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(args: &[&str]) -> Result<KeyValues, Error> {
        KeyValues::parse(&args.iter().map(|s| s.to_string()).collect::<Vec<_>>())
    }

    #[test]
    fn reads_and_rejects() {
        let mut p = kv(&["a=1.5", "b = 3"]).unwrap();
        assert_eq!(p.require::<f64>("a").unwrap(), 1.5);
        assert_eq!(p.get_or::<u64>("c", 7).unwrap(), 7);
        assert!(p.finish().is_err());
        assert!(kv(&["a"]).is_err());
        assert!(kv(&["a=1", "a=2"]).is_err());
        assert!(kv(&["a=x"]).unwrap().require::<f64>("a").is_err());
    }
}

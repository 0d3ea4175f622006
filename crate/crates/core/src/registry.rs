//! Named emitter parameters: the four built-in presets plus user entries.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::load_emitter_file;
use crate::physics::EmitterParams;

#[derive(Debug, Clone)]
pub struct EmitterRegistry {
    builtin: Vec<EmitterParams>,
    user: Vec<EmitterParams>,
}

impl Default for EmitterRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl EmitterRegistry {
    pub fn new() -> Self {
        EmitterRegistry {
            builtin: EmitterParams::presets().to_vec(),
            user: Vec::new(),
        }
    }

    /// Looks a name up, ignoring ASCII case.
    pub fn get(&self, name: &str) -> Option<&EmitterParams> {
        self.builtin
            .iter()
            .chain(&self.user)
            .find(|p| p.name.eq_ignore_ascii_case(name))
    }

    pub fn lookup(&self, name: &str) -> Result<EmitterParams> {
        self.get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownEmitter(name.to_string()))
    }

    pub fn is_builtin(&self, name: &str) -> bool {
        self.builtin.iter().any(|p| p.name.eq_ignore_ascii_case(name))
    }

    pub fn insert(&mut self, params: EmitterParams) -> Result<()> {
        params.validate()?;
        if self.get(&params.name).is_some() {
            return Err(Error::DuplicateEmitter(params.name));
        }
        self.user.push(params);
        Ok(())
    }

    pub fn load_file(&mut self, path: impl AsRef<Path>) -> Result<&EmitterParams> {
        let p = load_emitter_file(path)?;
        self.insert(p)?;
        Ok(self.user.last().expect("just inserted"))
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmitterParams> {
        self.builtin.iter().chain(&self.user)
    }

    /// Resolves either a registered name or a path to an emitter file.
    pub fn resolve(&self, name_or_path: &str) -> Result<EmitterParams> {
        if let Some(p) = self.get(name_or_path) {
            return Ok(p.clone());
        }
        let path = Path::new(name_or_path);
        if path.is_file() {
            return load_emitter_file(path);
        }
        Err(Error::UnknownEmitter(name_or_path.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_insensitive_lookup() {
        let r = EmitterRegistry::new();
        for n in ["SiV", "GEV", "snv", "pBv"] {
            assert!(r.get(n).is_some(), "{n}");
        }
        let pbv = r.lookup("pbv").unwrap();
        assert_eq!((pbv.f_gs, pbv.f_es, pbv.gamma0), (3870.0, 6920.0, 36.2));
        assert!(matches!(r.lookup("NV"), Err(Error::UnknownEmitter(_))));
    }

    #[test]
    fn builtins_cannot_be_shadowed() {
        let mut r = EmitterRegistry::new();
        let mut p = EmitterParams::pbv();
        p.name = "PBV".into();
        assert!(matches!(r.insert(p), Err(Error::DuplicateEmitter(_))));
        let mut q = EmitterParams::pbv();
        q.name = "PbV-strained".into();
        q.f_gs = 4000.0;
        r.insert(q).unwrap();
        assert_eq!(r.lookup("pbv-STRAINED").unwrap().f_gs, 4000.0);
        assert_eq!(r.lookup("PbV").unwrap().f_gs, 3870.0);
        assert!(!r.is_builtin("PbV-strained"));
    }
}

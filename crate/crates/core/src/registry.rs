//! Name → factory tables for runtime-selectable strategies.

use crate::error::{Error, Result};

pub type Factory<T, P> = fn(&P) -> Result<Box<T>>;

/// Maps strategy names to factories producing boxed trait objects from a
/// shared parameter type `P`.
pub struct Registry<T: ?Sized, P> {
    kind: &'static str,
    entries: Vec<(&'static str, Factory<T, P>)>,
}

impl<T: ?Sized, P> Registry<T, P> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds or replaces the factory registered under `name`.
    pub fn register(&mut self, name: &'static str, factory: Factory<T, P>) -> &mut Self {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(entry) => entry.1 = factory,
            None => self.entries.push((name, factory)),
        }
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn build(&self, name: &str, params: &P) -> Result<Box<T>> {
        let (_, factory) = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnknownName {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })?;
        factory(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Shape {
        fn area(&self) -> f64;
    }
    struct Square(f64);
    impl Shape for Square {
        fn area(&self) -> f64 {
            self.0 * self.0
        }
    }

    #[test]
    fn build_by_name() {
        let mut reg: Registry<dyn Shape, f64> = Registry::new("shape");
        reg.register("square", |&side| Ok(Box::new(Square(side))));
        assert_eq!(reg.build("square", &3.0).unwrap().area(), 9.0);
        assert!(reg.contains("square"));
        match reg.build("circle", &1.0) {
            Err(Error::UnknownName { available, .. }) => assert_eq!(available, "square"),
            _ => panic!("expected unknown-name error"),
        }
    }
}

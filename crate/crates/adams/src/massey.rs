//! 3-fold Massey products in the homology of the Lambda complex.
//!
//! For cycles `a, b, c` with `ab` and `bc` both boundaries, pick cochains
//! `u, v` with `d(u) = ab` and `d(v) = bc`; then `u c + a v` is a cycle and
//! its class is a representative of `<a, b, c>`. Signs vanish mod 2. The
//! indeterminacy is the subspace `a . H + H . c` of the target group, and the
//! bracket is the coset of the representative by that subspace.

use thiserror::Error;

use crate::ext::{ExtEngine, ExtError, HomologyClass};
use crate::f2::{AffineSubspace, BitVec};
use crate::lambda::{product, Bidegree, Element, LambdaError};

#[derive(Debug, Error)]
pub enum MasseyError {
    #[error("bracket not defined: {which} = {product} is nonzero in homology")]
    NotDefined { which: &'static str, product: Element },
    #[error("bidegree mismatch: {0:?} vs {1:?}")]
    BidegreeMismatch(Bidegree, Bidegree),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Lambda(#[from] LambdaError),
}

/// A computed bracket: value coset plus indeterminacy inside the homology
/// group at the target bidegree.
#[derive(Clone, Debug)]
pub struct MasseyResult {
    pub bidegree: Bidegree,
    /// Cochain representative of the value.
    pub value: Element,
    /// Coordinates of the value in the homology basis at `bidegree`.
    pub value_coords: BitVec,
    /// The coset `value + indeterminacy` as an affine subspace of homology
    /// coordinates.
    pub coset: AffineSubspace,
}

impl MasseyResult {
    pub fn indeterminacy_dim(&self) -> usize {
        self.coset.dim().unwrap_or(0)
    }

    pub fn strictly_defined(&self) -> bool {
        self.indeterminacy_dim() == 0
    }

    /// Membership test for a class at the target bidegree.
    pub fn contains(&self, engine: &ExtEngine, x: &HomologyClass) -> Result<bool, MasseyError> {
        if x.bidegree != self.bidegree {
            return Err(MasseyError::BidegreeMismatch(x.bidegree, self.bidegree));
        }
        let coords = engine
            .class_coordinates(&x.representative)?
            .expect("homology classes are cycles");
        Ok(self.coset.contains(&coords))
    }
}

/// The 3-fold Massey product of homology classes.
pub fn massey3(
    engine: &ExtEngine,
    a: &HomologyClass,
    b: &HomologyClass,
    c: &HomologyClass,
) -> Result<MasseyResult, MasseyError> {
    massey3_of_cycles(engine, &a.representative, &b.representative, &c.representative)
}

/// As [`massey3`], but over explicit cycle representatives; zero elements are
/// allowed and follow the convention that a bracket with a zero slot is the
/// coset of zero by the indeterminacy.
pub fn massey3_of_cycles(
    engine: &ExtEngine,
    a: &Element,
    b: &Element,
    c: &Element,
) -> Result<MasseyResult, MasseyError> {
    massey3_with_witnesses(engine, a, b, c, &Element::zero(ab_degree(a, b)), &Element::zero(ab_degree(b, c)))
}

fn ab_degree(a: &Element, b: &Element) -> Bidegree {
    Bidegree::new(
        a.bidegree().s + b.bidegree().s - 1,
        a.bidegree().t + b.bidegree().t,
    )
}

/// Core computation, with optional cycle perturbations added to the bounding
/// cochains. The perturbations exist so tests can verify that the choice of
/// defining system only moves the value within the indeterminacy.
pub fn massey3_with_witnesses(
    engine: &ExtEngine,
    a: &Element,
    b: &Element,
    c: &Element,
    u_extra: &Element,
    v_extra: &Element,
) -> Result<MasseyResult, MasseyError> {
    let ab = product(a, b)?;
    let Some(mut u) = engine.bound_by(&ab)? else {
        return Err(MasseyError::NotDefined {
            which: "a*b",
            product: ab,
        });
    };
    let bc = product(b, c)?;
    let Some(mut v) = engine.bound_by(&bc)? else {
        return Err(MasseyError::NotDefined {
            which: "b*c",
            product: bc,
        });
    };
    u.add_assign(u_extra)?;
    v.add_assign(v_extra)?;

    let mut value = product(&u, c)?;
    value.add_assign(&product(a, &v)?)?;
    let bidegree = value.bidegree();
    let value_coords = engine
        .class_coordinates(&value)?
        .expect("u c + a v is a cycle");

    // Indeterminacy: a . H(right) + H(left) . c, in homology coordinates.
    let mut dirs: Vec<BitVec> = Vec::new();
    let right = Bidegree::new(
        b.bidegree().s + c.bidegree().s - 1,
        b.bidegree().t + c.bidegree().t,
    );
    for class in engine.homology_basis(right.s, right.t)? {
        let p = product(a, &class.representative)?;
        let coords = engine
            .class_coordinates(&p)?
            .expect("product of cycles is a cycle");
        if !coords.is_zero() {
            dirs.push(coords);
        }
    }
    let left = ab_degree(a, b);
    for class in engine.homology_basis(left.s, left.t)? {
        let p = product(&class.representative, c)?;
        let coords = engine
            .class_coordinates(&p)?
            .expect("product of cycles is a cycle");
        if !coords.is_zero() {
            dirs.push(coords);
        }
    }
    let coset = AffineSubspace::new(value_coords.clone(), &dirs);
    Ok(MasseyResult {
        bidegree,
        value,
        value_coords,
        coset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::standard_catalog;

    fn class(engine: &ExtEngine, name: &str) -> HomologyClass {
        engine
            .resolve_class(name)
            .unwrap()
            .unwrap_or_else(|| panic!("class {name} should resolve"))
    }

    #[test]
    fn bracket_h1_h0_h2sq_is_c0() {
        let engine = ExtEngine::in_memory();
        let h1 = class(&engine, "h1");
        let h0 = class(&engine, "h0");
        let h2sq = class(&engine, "h2^2");
        let r = massey3(&engine, &h1, &h0, &h2sq).unwrap();
        assert_eq!(r.bidegree, Bidegree::new(3, 11));
        assert!(r.strictly_defined());
        // The value is the unique class at (3,11), which identify names c0.
        engine.compute_through(11).unwrap();
        engine.identify(&standard_catalog(), 11).unwrap();
        let c0 = &engine.homology_basis(3, 11).unwrap()[0];
        assert_eq!(c0.name.as_deref(), Some("c0"));
        assert!(r.contains(&engine, c0).unwrap());
        assert!(!r.value_coords.is_zero());
    }

    #[test]
    fn bracket_h0_h1_h0_is_h1_squared() {
        // h0 h1 = 0 on the nose and h1 h0 = d(l2), so the bracket is defined;
        // its value lands on eta^2 at (2, 4) with no indeterminacy.
        let engine = ExtEngine::in_memory();
        let h0 = class(&engine, "h0");
        let h1 = class(&engine, "h1");
        let r = massey3(&engine, &h0, &h1, &h0).unwrap();
        assert_eq!(r.bidegree, Bidegree::new(2, 4));
        assert!(r.strictly_defined());
        let h1sq = class(&engine, "h1^2");
        assert!(r.contains(&engine, &h1sq).unwrap());
    }

    #[test]
    fn undefined_when_product_survives() {
        let engine = ExtEngine::in_memory();
        let h0 = class(&engine, "h0");
        let err = massey3(&engine, &h0, &h0, &h0).unwrap_err();
        match err {
            MasseyError::NotDefined { product, .. } => {
                assert_eq!(product.to_string(), "l0 l0");
            }
            other => panic!("expected NotDefined, got {other:?}"),
        }
    }

    #[test]
    fn zero_slot_gives_coset_of_zero() {
        let engine = ExtEngine::in_memory();
        let h1 = class(&engine, "h1");
        let h0 = class(&engine, "h0");
        let zero = Element::zero(Bidegree::new(2, 8));
        let r = massey3_of_cycles(
            &engine,
            &h1.representative,
            &h0.representative,
            &zero,
        )
        .unwrap();
        assert!(r.value_coords.is_zero());
        assert!(r.coset.contains(&r.value_coords));
    }

    #[test]
    fn contains_respects_indeterminacy() {
        let engine = ExtEngine::in_memory();
        let h1 = class(&engine, "h1");
        let h0 = class(&engine, "h0");
        let h2sq = class(&engine, "h2^2");
        let r = massey3(&engine, &h1, &h0, &h2sq).unwrap();
        // Strictly defined: only the value itself is in the coset.
        let h = engine.homology_basis(3, 11).unwrap();
        for x in &h {
            let member = r.contains(&engine, x).unwrap();
            let same = engine
                .class_coordinates(&x.representative)
                .unwrap()
                .unwrap()
                == r.value_coords;
            assert_eq!(member, same);
        }
        // Mismatched bidegrees error out.
        let err = r.contains(&engine, &h1).unwrap_err();
        assert!(matches!(err, MasseyError::BidegreeMismatch(..)));
    }

    #[test]
    fn bidegree_law() {
        let engine = ExtEngine::in_memory();
        let h1 = class(&engine, "h1");
        let h0 = class(&engine, "h0");
        let h2 = class(&engine, "h2");
        for (a, b, c) in [(&h1, &h0, &h2), (&h0, &h1, &h0), (&h2, &h1, &h2)] {
            let Ok(r) = massey3(&engine, a, b, c) else {
                continue;
            };
            assert_eq!(
                r.bidegree,
                Bidegree::new(
                    a.bidegree.s + b.bidegree.s + c.bidegree.s - 1,
                    a.bidegree.t + b.bidegree.t + c.bidegree.t
                )
            );
        }
    }

    #[test]
    fn perturbed_defining_system_stays_in_coset() {
        use rand::{Rng, SeedableRng};
        let engine = ExtEngine::in_memory();
        let h1 = class(&engine, "h1");
        let h0 = class(&engine, "h0");
        let h2sq = class(&engine, "h2^2");
        let baseline = massey3(&engine, &h1, &h0, &h2sq).unwrap();

        // Perturb u and v by random cycles of the right bidegree.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u_deg = Bidegree::new(1, 3);
        let v_deg = Bidegree::new(2, 9);
        for _ in 0..20 {
            let mut u_extra = Element::zero(u_deg);
            for class in engine.homology_basis(u_deg.s, u_deg.t).unwrap() {
                if rng.gen_bool(0.5) {
                    u_extra.add_assign(&class.representative).unwrap();
                }
            }
            let mut v_extra = Element::zero(v_deg);
            for class in engine.homology_basis(v_deg.s, v_deg.t).unwrap() {
                if rng.gen_bool(0.5) {
                    v_extra.add_assign(&class.representative).unwrap();
                }
            }
            let r = massey3_with_witnesses(
                &engine,
                &h1.representative,
                &h0.representative,
                &h2sq.representative,
                &u_extra,
                &v_extra,
            )
            .unwrap();
            assert!(
                baseline.coset.contains(&r.value_coords),
                "perturbed value left the coset"
            );
        }
    }
}

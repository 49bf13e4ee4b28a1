//! Shared set-up for all descent methods: torsion data with the pairing
//! oriented by the translation matrices, the étale basis and `epsilon`.

use std::sync::Arc;

use crate::elliptic::{Curve, TorsionData};
use crate::error::Result;
use crate::etale::{Etale, R2Elt};
use crate::field::Tower;
use crate::theta::{
    epsilon_from_f, epsilon_from_m, pairing_orientation, translation_matrices, TranslationMatrices,
};

#[derive(Clone, Debug)]
pub struct Setup {
    pub curve: Curve,
    pub etale: Etale,
    /// Normalized translation matrices (odd `n`).
    pub translations: Option<TranslationMatrices>,
    /// `epsilon` from the translation matrices for odd `n`, from Miller functions otherwise.
    pub epsilon: R2Elt,
}

impl Setup {
    pub fn new(p: u64, a4: i64, a6: i64, n: usize, seed: u64) -> Result<Setup> {
        let curve = Curve::new(&Tower::new(p), a4, a6)?;
        Setup::for_curve(&curve, n, seed)
    }

    pub fn for_curve(curve: &Curve, n: usize, seed: u64) -> Result<Setup> {
        let mut td = TorsionData::new(curve, n)?;
        let (translations, epsilon) = if n % 2 == 1 {
            let tm = translation_matrices(&td, seed)?;
            if pairing_orientation(&td, &tm)? < 0 {
                td.reorient();
            }
            let eps = epsilon_from_m(&td, &tm)?;
            (Some(tm), eps)
        } else {
            let eps = epsilon_from_f(&td, seed)?;
            (None, eps)
        };
        let etale = Etale::new(Arc::new(td))?;
        Ok(Setup {
            curve: curve.clone(),
            etale,
            translations,
            epsilon,
        })
    }

    pub fn n(&self) -> usize {
        self.etale.n()
    }

    pub fn torsion(&self) -> &TorsionData {
        self.etale.torsion()
    }

    /// `epsilon` from Miller functions (the Segre normalization).
    pub fn epsilon_f(&self, seed: u64) -> Result<R2Elt> {
        epsilon_from_f(self.etale.torsion(), seed)
    }
}

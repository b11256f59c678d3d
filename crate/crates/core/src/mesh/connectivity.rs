//! Face matching by sorted vertex-index pairs.

use super::MeshData;
use crate::refel::NFACES;
use crate::{Error, Result};
use std::collections::HashMap;

impl MeshData {
    /// Fill etoe/etof. Boundary faces self-reference. Interior matches must
    /// traverse the shared edge in opposite directions; a same-direction
    /// match or a face shared by more than two elements is non-conforming.
    pub(super) fn build_connectivity(&mut self) -> Result<()> {
        let k = self.k();
        self.etoe = (0..k).map(|e| [e; NFACES]).collect();
        self.etof = (0..k).map(|_| [0, 1, 2]).collect();
        self.face_tag = vec![[None; NFACES]; k];

        let mut by_pair: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for e in 0..k {
            for f in 0..NFACES {
                let (a, b) = self.face_vertices(e, f);
                by_pair.entry((a.min(b), a.max(b))).or_default().push((e, f));
            }
        }
        for (pair, slots) in by_pair {
            match slots.len() {
                1 => {} // boundary, keeps self-reference
                2 => {
                    let (e1, f1) = slots[0];
                    let (e2, f2) = slots[1];
                    let d1 = self.face_vertices(e1, f1);
                    let d2 = self.face_vertices(e2, f2);
                    if d1 == d2 {
                        return Err(Error::mesh(format!(
                            "non-conforming mesh: faces of elements {e1} and {e2} traverse edge \
                             ({}, {}) in the same direction",
                            pair.0, pair.1
                        )));
                    }
                    self.etoe[e1][f1] = e2;
                    self.etof[e1][f1] = f2;
                    self.etoe[e2][f2] = e1;
                    self.etof[e2][f2] = f1;
                }
                n => {
                    return Err(Error::mesh(format!(
                        "non-conforming mesh: edge ({}, {}) shared by {n} faces",
                        pair.0, pair.1
                    )))
                }
            }
        }
        Ok(())
    }

    /// True when face f of element k lies on the domain boundary.
    pub fn is_boundary_face(&self, k: usize, f: usize) -> bool {
        self.etoe[k][f] == k && self.etof[k][f] == f
    }
}

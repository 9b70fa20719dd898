use std::fmt;

use super::{circuit_from_table, tabulate, Assignment, Circuit, CircuitBuilder, Gate, Leaf, TruthTable};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// An element of the quotient algebra of circuits over `n` variables modulo
/// semantic equivalence: a canonical truth table plus one representative.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    table: TruthTable,
    witness: Circuit,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for AlgebraElement {}

impl std::hash::Hash for AlgebraElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.table.hash(state)
    }
}

impl AlgebraElement {
    /// The class of a plain circuit, viewed over `n` variables.
    pub fn from_circuit(witness: Circuit, n: u32) -> Result<Self> {
        Self::from_circuit_within(witness, n, &Limits::default())
    }

    pub fn from_circuit_within(witness: Circuit, n: u32, limits: &Limits) -> Result<Self> {
        let table = witness.truth_table_within(n, limits)?;
        Ok(AlgebraElement {
            table,
            witness: witness.widened(n, 0),
        })
    }

    /// An element whose representative is synthesized from the table.
    pub fn from_table(table: TruthTable) -> Self {
        let witness = circuit_from_table(&table);
        AlgebraElement { table, witness }
    }

    pub(crate) fn from_parts(table: TruthTable, witness: Circuit) -> Self {
        AlgebraElement { table, witness }
    }

    pub fn zero(n: u32) -> Self {
        AlgebraElement {
            table: TruthTable::zero(n),
            witness: Circuit::constant(false, n),
        }
    }

    pub fn one(n: u32) -> Self {
        AlgebraElement {
            table: TruthTable::one(n),
            witness: Circuit::constant(true, n),
        }
    }

    pub fn constant(b: bool, n: u32) -> Self {
        if b {
            Self::one(n)
        } else {
            Self::zero(n)
        }
    }

    /// The generator `p_k`.
    pub fn var(k: u32, n: u32) -> Result<Self> {
        if k >= n {
            return Err(Error::Arity {
                expected: n as usize,
                got: k as usize + 1,
            });
        }
        Self::from_circuit(Circuit::var(k, n), n)
    }

    /// The atom below exactly one assignment: the conjunction of its literals.
    pub fn atom(a: &Assignment) -> Self {
        let n = a.len() as u32;
        let mut b = CircuitBuilder::new(n, 0);
        let lits: Vec<_> = a
            .bits()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let p = b.var(i as u32);
                if v {
                    p
                } else {
                    b.not(p)
                }
            })
            .collect();
        let out = b.and_all(lits);
        let mut table = TruthTable::zero(n);
        table.set(a.index(), true);
        AlgebraElement {
            table,
            witness: b.finish(out).widened(n, 0),
        }
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn witness(&self) -> &Circuit {
        &self.witness
    }

    pub fn num_vars(&self) -> u32 {
        self.table.num_vars()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.table.is_one()
    }

    /// Value at a single assignment.
    pub fn at(&self, a: &Assignment) -> bool {
        self.table.at(a)
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.num_vars() != other.num_vars() {
            Err(Error::Arity {
                expected: self.num_vars() as usize,
                got: other.num_vars() as usize,
            })
        } else {
            Ok(())
        }
    }

    fn binary(
        &self,
        other: &Self,
        table: TruthTable,
        gate: impl FnOnce(&mut CircuitBuilder, super::NodeId, super::NodeId) -> super::NodeId,
    ) -> Self {
        let n = self.num_vars();
        let mut b = CircuitBuilder::new(n, 0);
        let x = b.import(&self.witness);
        let y = b.import(&other.witness);
        let o = gate(&mut b, x, y);
        AlgebraElement {
            table,
            witness: b.finish(o).widened(n, 0),
        }
    }

    /// `≤_A`: bitwise comparison of canonical tables.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.same_n(other)?;
        self.table.leq(&other.table)
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let t = self.table.and(&other.table)?;
        Ok(self.binary(other, t, |b, x, y| b.and(x, y)))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let t = self.table.or(&other.table)?;
        Ok(self.binary(other, t, |b, x, y| b.or(x, y)))
    }

    pub fn complement(&self) -> Self {
        let n = self.num_vars();
        let mut b = CircuitBuilder::new(n, 0);
        let x = b.import(&self.witness);
        let o = b.not(x);
        AlgebraElement {
            table: self.table.not(),
            witness: b.finish(o).widened(n, 0),
        }
    }

    /// `x → y` as `¬x ∨ y`.
    pub fn implies(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let t = self.table.not().or(&other.table)?;
        Ok(self.binary(other, t, |b, x, y| b.imp(x, y)))
    }

    /// `x ↔ y`.
    pub fn iff(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        let t = self
            .table
            .not()
            .or(&other.table)?
            .and(&other.table.not().or(&self.table)?)?;
        Ok(self.binary(other, t, |b, x, y| b.iff(x, y)))
    }

    /// Meet of a family; the empty meet is `one(n)`.
    pub fn meet_all<'a>(n: u32, items: impl IntoIterator<Item = &'a AlgebraElement>) -> Result<Self> {
        items.into_iter().try_fold(Self::one(n), |acc, x| acc.meet(x))
    }

    /// Join of a family; the empty join is `zero(n)`.
    pub fn join_all<'a>(n: u32, items: impl IntoIterator<Item = &'a AlgebraElement>) -> Result<Self> {
        items.into_iter().try_fold(Self::zero(n), |acc, x| acc.join(x))
    }

    /// The atoms below this element, one per satisfying assignment.
    pub fn atoms_below(&self) -> impl Iterator<Item = Assignment> + '_ {
        let n = self.num_vars();
        self.table.ones().map(move |i| Assignment::from_index(i, n))
    }

    /// Substitutes `entries[k]` for `p_k` in a plain circuit.
    pub fn substitute(c: &Circuit, entries: &[AlgebraElement], n: u32) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.num_vars() != n) {
            return Err(Error::Arity {
                expected: n as usize,
                got: e.num_vars() as usize,
            });
        }
        let var_err = |k: u32| Error::Arity {
            expected: entries.len(),
            got: k as usize + 1,
        };
        let table = tabulate(c, n, |g| match g {
            Gate::Var(k) => entries.get(k as usize).map(|e| Leaf::Table(&e.table)).ok_or(var_err(k)),
            Gate::RVar(k) => Err(Error::RandomVariable(k)),
            _ => unreachable!(),
        })?;
        let mut b = CircuitBuilder::new(n, 0);
        let out = b.import_with(c, |b, g| match g {
            Gate::Var(k) => b.import(&entries[k as usize].witness),
            g => b.intern(g),
        });
        Ok(AlgebraElement {
            table,
            witness: b.finish(out).widened(n, 0),
        })
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut ChaCha8Rng, n: u32) -> AlgebraElement {
        let bits: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
        AlgebraElement::from_table(TruthTable::from_fn(n, |i| bits[i]))
    }

    #[test]
    fn order_examples() {
        let p0 = AlgebraElement::var(0, 2).unwrap();
        let p1 = AlgebraElement::var(1, 2).unwrap();
        assert!(p0.meet(&p1).unwrap().leq(&p0).unwrap());
        assert!(!p0.leq(&p1).unwrap());
        // the witness of non-comparability is A = (1,0)
        let a = Assignment::from_bits(vec![true, false]);
        assert!(p0.at(&a) && !p1.at(&a));
        let q = AlgebraElement::var(0, 3).unwrap();
        assert!(p0.leq(&q).is_err());
    }

    #[test]
    fn leq_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = random_element(&mut rng, 6);
            let y = random_element(&mut rng, 6);
            let brute = Assignment::all(6).all(|a| !x.witness().eval(&a).unwrap() || y.witness().eval(&a).unwrap());
            assert_eq!(x.leq(&y).unwrap(), brute);
        }
    }

    #[test]
    fn basic_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_element(&mut rng, 4);
            let y = random_element(&mut rng, 4);
            assert_eq!(x.meet(&x.complement()).unwrap(), AlgebraElement::zero(4));
            assert_eq!(AlgebraElement::zero(4).join(&y).unwrap(), y);
        }
    }

    #[test]
    fn witnesses_follow_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_element(&mut rng, 3);
        let y = random_element(&mut rng, 3);
        for e in [
            x.meet(&y).unwrap(),
            x.join(&y).unwrap(),
            x.complement(),
            x.iff(&y).unwrap(),
            x.implies(&y).unwrap(),
        ] {
            for a in Assignment::all(3) {
                assert_eq!(e.witness().eval(&a).unwrap(), e.at(&a));
            }
        }
        assert!(matches!(x.meet(&y).unwrap().witness().output_gate(), Gate::And(..)));
    }

    #[test]
    fn atoms_are_point_indicators() {
        let a = Assignment::from_bits(vec![true, false, true]);
        let e = AlgebraElement::atom(&a);
        assert_eq!(e.table().count_ones(), 1);
        assert!(e.at(&a));
        assert_eq!(e.atoms_below().collect::<Vec<_>>(), vec![a]);
    }

    #[test]
    fn substitution_evaluates_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let entries: Vec<_> = (0..3).map(|_| random_element(&mut rng, 4)).collect();
        let mut b = CircuitBuilder::new(3, 0);
        let (p0, p1, p2) = (b.var(0), b.var(1), b.var(2));
        let l = b.and(p0, p1);
        let n2 = b.not(p2);
        let o = b.or(l, n2);
        let c = b.finish(o);
        let s = AlgebraElement::substitute(&c, &entries, 4).unwrap();
        for a in Assignment::all(4) {
            let inner: Vec<bool> = entries.iter().map(|e| e.at(&a)).collect();
            assert_eq!(s.at(&a), c.eval_with(&inner, &[]));
            assert_eq!(s.witness().eval(&a).unwrap(), s.at(&a));
        }
    }
}

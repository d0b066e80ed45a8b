//! Sorts, values, typed terms, assignments and finite-domain reasoning.

mod assign;
mod eval;
mod parse;
mod sort;
mod term;

pub use assign::{show_valuation, union_valuations, valuation_formula, Assignment};
pub use eval::{
    all_valuations, evaluate, find_difference, find_implication_witness, find_model, holds, is_satisfiable, is_valid,
    sem_equiv, sem_implies, simplify, Evaluator,
};
pub use parse::{parse_formula, parse_term, Scope};
pub use sort::{DomainSpec, Sort, SortEntry, SortKind, Type, Value, BOOL_SORT, DEFAULT_VALUATION_CAP};
pub use term::{BinOp, Term, Valuation, Var, VarDecl, VarKind};

pub(crate) use parse::{lex, Parser, Tok, Token};

#[cfg(test)]
pub(crate) mod fixtures {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;

    pub struct Fixture {
        pub domain: DomainSpec,
        pub vars: BTreeMap<String, Arc<VarDecl>>,
    }

    impl Fixture {
        pub fn new() -> Self {
            let domain = DomainSpec::new(&[
                Sort::new("Small", SortKind::Int { lo: 0, hi: 2 }),
                Sort::new(
                    "Color",
                    SortKind::Enum {
                        values: vec!["R".into(), "G".into()],
                    },
                ),
                Sort::new(
                    "Bag",
                    SortKind::List {
                        elem: "Small".into(),
                        max_len: 2,
                    },
                ),
            ])
            .unwrap();
            let decls = [
                VarDecl::new("a", "Small", VarKind::Model),
                VarDecl::new("b", "Small", VarKind::Interaction),
                VarDecl::new("p", "Bool", VarKind::Model),
                VarDecl::new("q", "Bool", VarKind::Interaction),
                VarDecl::new("c", "Color", VarKind::Context),
                VarDecl::new("l", "Bag", VarKind::Model),
            ];
            let vars = decls.into_iter().map(|d| (d.name.clone(), d)).collect();
            Fixture { domain, vars }
        }

        pub fn scope(&self) -> Scope<'_> {
            Scope {
                vars: &self.vars,
                domain: &self.domain,
            }
        }

        pub fn parse(&self, src: &str) -> Term {
            parse_term(src, &self.scope()).unwrap()
        }

        pub fn var(&self, name: &str) -> Var {
            Var::new(self.vars[name].clone())
        }
    }
}

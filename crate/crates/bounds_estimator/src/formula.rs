//! Every reported number is produced by evaluating its own formula string,
//! so re-evaluating a record from its printed form is bit-identical.
//!
//! Syntax is evalexpr's: `^` is a float power, `math::ln` and `math::log2`
//! name their base, and two extra functions `ln1p` and `expm1` keep tiny
//! probabilities accurate.

use std::collections::BTreeMap;

use evalexpr::{build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables, DefaultNumericTypes, Function, HashMapContext, Value};
use serde::{Deserialize, Serialize};

use crate::{BoundsError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub name: String,
    pub formula: String,
    /// Values of the identifiers the formula refers to.
    pub constants: BTreeMap<String, f64>,
    pub value: f64,
}

impl Record {
    /// Evaluates the formula again from the stored constants.
    pub fn reevaluate(&self) -> Result<f64> {
        evaluate(&self.formula, &self.constants)
    }
}

fn unary(f: fn(f64) -> f64) -> Function<DefaultNumericTypes> {
    Function::new(move |arg: &Value<DefaultNumericTypes>| Ok(Value::Float(f(arg.as_number()?))))
}

fn context(bindings: &BTreeMap<String, f64>) -> Result<HashMapContext<DefaultNumericTypes>> {
    let err = |e: evalexpr::EvalexprError<DefaultNumericTypes>| BoundsError::Formula(e.to_string());
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    ctx.set_function("ln1p".into(), unary(f64::ln_1p)).map_err(err)?;
    ctx.set_function("expm1".into(), unary(f64::exp_m1)).map_err(err)?;
    for (k, &v) in bindings {
        ctx.set_value(k.clone(), Value::Float(v)).map_err(err)?;
    }
    Ok(ctx)
}

/// Evaluates `formula` with `bindings`.
pub fn evaluate(formula: &str, bindings: &BTreeMap<String, f64>) -> Result<f64> {
    let tree = build_operator_tree::<DefaultNumericTypes>(formula).map_err(|e| BoundsError::Formula(format!("{formula}: {e}")))?;
    tree.eval_number_with_context(&context(bindings)?).map_err(|e| BoundsError::Formula(format!("{formula}: {e}")))
}

fn identifiers(formula: &str) -> Result<Vec<String>> {
    let tree = build_operator_tree::<DefaultNumericTypes>(formula).map_err(|e| BoundsError::Formula(format!("{formula}: {e}")))?;
    Ok(tree.iter_variable_identifiers().map(str::to_owned).collect())
}

/// Ordered list of records; each result becomes a binding for later ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    bindings: BTreeMap<String, f64>,
    pub records: Vec<Record>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds an input parameter (not itself a record).
    pub fn bind(&mut self, name: &str, value: f64) -> &mut Self {
        self.bindings.insert(name.to_owned(), value);
        self
    }

    /// Evaluates `formula`, records it and binds `name` to the result.
    pub fn add(&mut self, name: &str, formula: &str) -> Result<f64> {
        let mut constants = BTreeMap::new();
        for id in identifiers(formula)? {
            let v = *self.bindings.get(&id).ok_or_else(|| BoundsError::Formula(format!("{formula}: unbound identifier {id}")))?;
            constants.insert(id, v);
        }
        let value = evaluate(formula, &constants)?;
        self.bindings.insert(name.to_owned(), value);
        self.records.push(Record { name: name.to_owned(), formula: formula.to_owned(), constants, value });
        Ok(value)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.bindings.get(name).copied()
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }
}

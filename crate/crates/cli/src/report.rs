use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Number, Value};

use crate::params::InstanceParams;

pub const SCHEMA: u64 = 1;

pub fn int(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

pub fn rat(x: &BigRational) -> Value {
    json!({ "num": int(x.numer()), "den": int(x.denom()) })
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

/// A CSV table: header plus rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub instance: Value,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, params: &InstanceParams, table: Table) -> Self {
        Report {
            command: command.to_string(),
            instance: params.to_json(),
            results: Map::new(),
            checks: Vec::new(),
            table,
        }
    }

    pub fn result(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: Value) {
        self.checks.push(Check { name: name.to_string(), pass, detail });
    }

    /// Records a library call that verifies internally: `Ok` passes with its
    /// value, `Err` fails with the message.
    pub fn verified<T>(&mut self, name: &str, r: jacarith::Result<T>, show: impl FnOnce(&T) -> Value) -> Option<T> {
        match r {
            Ok(v) => {
                self.check(name, true, show(&v));
                Some(v)
            }
            Err(e) => {
                self.check(name, false, json!({ "error": e.to_string() }));
                None
            }
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
            .collect();
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "instance": self.instance,
            "results": Value::Object(self.results.clone()),
            "checks": checks,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable report")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header).expect("write to memory");
        for row in &self.table.rows {
            w.write_record(row).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_numbers_stay_exact() {
        let x = BigInt::from(10).pow(40) + 7;
        assert_eq!(int(&x).to_string(), x.to_string());
        let r = BigRational::new(BigInt::from(-6), BigInt::from(8));
        assert_eq!(rat(&r).to_string(), r#"{"den":4,"num":-3}"#);
    }
}

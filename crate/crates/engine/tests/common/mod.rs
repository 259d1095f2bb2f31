#![allow(dead_code)]

use std::path::PathBuf;

use serde_json::{Map, Value};
use stepwise_core::data::{
    derive_column, drop_rows_where, load_csv, Column, Comparator, CsvOptions, Dataset, Expr,
    Literal, Predicate,
};

pub fn load(name: &str) -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name);
    load_csv(std::fs::File::open(path).unwrap(), &CsvOptions::default()).unwrap()
}

/// Housing without the capped 500001 rows, plus per-person room counts.
pub fn housing_prepared() -> Dataset {
    let d = load("housing.csv");
    let d = drop_rows_where(
        &d,
        &Predicate::new(
            "median_house_value",
            Comparator::Eq,
            Literal::Number(500001.0),
        ),
    )
    .unwrap();
    let d = derive_column(
        &d,
        "avg_rooms",
        &"total_rooms / population".parse::<Expr>().unwrap(),
    )
    .unwrap();
    derive_column(
        &d,
        "avg_bedrooms",
        &"total_bedrooms / population".parse::<Expr>().unwrap(),
    )
    .unwrap()
}

pub fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => panic!("expected an object, got {other}"),
    }
}

/// Two numeric groups in long format: column `y`, group column `g`.
pub fn two_groups(a: &[f64], b: &[f64]) -> Dataset {
    let y: Vec<Option<f64>> = a.iter().chain(b).map(|&v| Some(v)).collect();
    let g: Vec<Option<String>> = std::iter::repeat_n("a", a.len())
        .chain(std::iter::repeat_n("b", b.len()))
        .map(|s| Some(s.to_string()))
        .collect();
    Dataset::new(vec![Column::numeric("y", y), Column::categorical("g", g)]).unwrap()
}

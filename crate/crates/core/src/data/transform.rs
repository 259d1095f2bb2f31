use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{format_number, Column, ColumnData, DType, DataError, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "=", alias = "==")]
    Eq,
    #[serde(rename = "!=", alias = "≠")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=", alias = "≤")]
    Le,
    #[serde(rename = ">=", alias = "≥")]
    Ge,
    #[serde(rename = "in")]
    In,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
            Comparator::In => "in",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    Text(String),
    NumberSet(Vec<f64>),
    TextSet(Vec<String>),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(x) => f.write_str(&format_number(*x)),
            Literal::Text(s) => write!(f, "{s:?}"),
            Literal::NumberSet(v) => {
                let items: Vec<_> = v.iter().map(|x| format_number(*x)).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            Literal::TextSet(v) => {
                let items: Vec<_> = v.iter().map(|s| format!("{s:?}")).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

/// Row filter `column <comparator> literal`. Missing cells never match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub column: String,
    #[serde(rename = "op")]
    pub comparator: Comparator,
    #[serde(rename = "value")]
    pub literal: Literal,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.column, self.comparator, self.literal)
    }
}

impl Predicate {
    pub fn new(column: impl Into<String>, comparator: Comparator, literal: Literal) -> Self {
        Predicate {
            column: column.into(),
            comparator,
            literal,
        }
    }

    /// Per-row match flags.
    fn evaluate(&self, dataset: &Dataset) -> Result<Vec<bool>, DataError> {
        let col = dataset.column(&self.column)?;
        let mismatch = || {
            DataError::InvalidArgument(format!(
                "cannot compare {} column `{}` with {} using `{}`",
                col.dtype(),
                self.column,
                self.literal,
                self.comparator
            ))
        };
        match (col.data(), &self.literal, self.comparator) {
            (ColumnData::Numeric(v), Literal::Number(x), cmp) if cmp != Comparator::In => Ok(v
                .iter()
                .map(|cell| cell.is_some_and(|c| compare_num(c, *x, cmp)))
                .collect()),
            (ColumnData::Numeric(v), Literal::NumberSet(set), Comparator::In) => Ok(v
                .iter()
                .map(|cell| cell.is_some_and(|c| set.contains(&c)))
                .collect()),
            (ColumnData::Categorical(v), Literal::Text(s), Comparator::Eq) => {
                Ok(v.iter().map(|cell| cell.as_deref() == Some(s)).collect())
            }
            (ColumnData::Categorical(v), Literal::Text(s), Comparator::Ne) => Ok(v
                .iter()
                .map(|cell| cell.as_deref().is_some_and(|c| c != s))
                .collect()),
            (ColumnData::Categorical(v), Literal::TextSet(set), Comparator::In) => Ok(v
                .iter()
                .map(|cell| cell.as_ref().is_some_and(|c| set.contains(c)))
                .collect()),
            _ => Err(mismatch()),
        }
    }
}

fn compare_num(cell: f64, lit: f64, cmp: Comparator) -> bool {
    match cmp {
        Comparator::Eq => cell == lit,
        Comparator::Ne => cell != lit,
        Comparator::Lt => cell < lit,
        Comparator::Gt => cell > lit,
        Comparator::Le => cell <= lit,
        Comparator::Ge => cell >= lit,
        Comparator::In => unreachable!("set membership handled separately"),
    }
}

/// Returns a new dataset holding exactly the rows that do not match.
pub fn drop_rows_where(dataset: &Dataset, predicate: &Predicate) -> Result<Dataset, DataError> {
    let matches = predicate.evaluate(dataset)?;
    let keep: Vec<usize> = (0..dataset.row_count()).filter(|&r| !matches[r]).collect();
    let dropped = dataset.row_count() - keep.len();
    Ok(dataset.take_rows(
        &keep,
        format!("drop rows where {predicate} ({dropped} rows removed)"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "/")]
    Div,
}

impl ArithOp {
    fn apply(self, a: f64, b: f64) -> Option<f64> {
        let out = match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div if b == 0.0 => return None,
            ArithOp::Div => a / b,
        };
        out.is_finite().then_some(out)
    }

    fn symbol(self) -> char {
        match self {
            ArithOp::Add => '+',
            ArithOp::Sub => '-',
            ArithOp::Mul => '*',
            ArithOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    Scalar(f64),
    Column(String),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Scalar(x) => f.write_str(&format_number(*x)),
            Operand::Column(c) => f.write_str(c),
        }
    }
}

/// Binary arithmetic over numeric columns and scalars, e.g. `total_rooms / population`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    pub left: Operand,
    pub op: ArithOp,
    pub right: Operand,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op.symbol(), self.right)
    }
}

impl FromStr for Expr {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DataError::InvalidArgument(format!("cannot parse expression `{s}`"));
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let [left, op, right] = tokens.as_slice() else {
            return Err(bad());
        };
        let op = match *op {
            "+" => ArithOp::Add,
            "-" => ArithOp::Sub,
            "*" => ArithOp::Mul,
            "/" => ArithOp::Div,
            _ => return Err(bad()),
        };
        let operand = |t: &str| match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Operand::Scalar(x),
            _ => Operand::Column(t.to_string()),
        };
        Ok(Expr {
            left: operand(left),
            op,
            right: operand(right),
        })
    }
}

impl Expr {
    fn operand_values<'a>(
        dataset: &'a Dataset,
        operand: &Operand,
    ) -> Result<Box<dyn Fn(usize) -> Option<f64> + 'a>, DataError> {
        Ok(match operand {
            Operand::Scalar(x) => {
                let x = *x;
                Box::new(move |_| Some(x))
            }
            Operand::Column(name) => {
                let values = dataset.column(name)?.as_numeric()?;
                Box::new(move |r| values[r])
            }
        })
    }
}

/// Appends `new_name = expression`. Missing operands and division by zero
/// produce missing cells.
pub fn derive_column(dataset: &Dataset, new_name: &str, expr: &Expr) -> Result<Dataset, DataError> {
    if new_name.trim().is_empty() {
        return Err(DataError::EmptyColumnName(dataset.column_count()));
    }
    if dataset.has_column(new_name) {
        return Err(DataError::NameCollision(new_name.to_string()));
    }
    let left = Expr::operand_values(dataset, &expr.left)?;
    let right = Expr::operand_values(dataset, &expr.right)?;
    let values = (0..dataset.row_count())
        .map(|r| match (left(r), right(r)) {
            (Some(a), Some(b)) => expr.op.apply(a, b),
            _ => None,
        })
        .collect();
    let mut columns = dataset.arc_columns().to_vec();
    columns.push(Arc::new(Column::numeric(new_name, values)));
    Ok(dataset.derive(
        columns,
        dataset.row_count(),
        format!("derive {new_name} = {expr}"),
    ))
}

/// Natural log in place; non-positive values become missing.
pub fn log_transform(dataset: &Dataset, column: &str) -> Result<Dataset, DataError> {
    let col = dataset.column(column)?;
    let values = col.as_numeric().map_err(|_| DataError::TypeMismatch {
        column: column.to_string(),
        expected: DType::Numeric,
        actual: col.dtype(),
    })?;
    let logged = values
        .iter()
        .map(|v| v.filter(|x| *x > 0.0).map(f64::ln))
        .collect();
    let replacement = Arc::new(Column::numeric(column, logged));
    let columns = dataset
        .arc_columns()
        .iter()
        .map(|c| {
            if c.name() == column {
                replacement.clone()
            } else {
                c.clone()
            }
        })
        .collect();
    Ok(dataset.derive(
        columns,
        dataset.row_count(),
        format!("log transform {column}"),
    ))
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset};

/// Seeded shuffle split. The training part holds `floor(ratio * n)` rows;
/// both parts keep the original row order.
pub fn train_test_split(
    dataset: &Dataset,
    ratio: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), DataError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(DataError::InvalidArgument(format!(
            "split ratio {ratio} outside (0, 1]"
        )));
    }
    let (train, test) = split_indices(dataset.row_count(), ratio, seed);
    Ok((
        dataset.take_rows(&train, format!("train split (ratio {ratio}, seed {seed})")),
        dataset.take_rows(&test, format!("test split (ratio {ratio}, seed {seed})")),
    ))
}

/// Index form of [`train_test_split`], for callers that already hold row data.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((ratio * n as f64).floor() as usize).min(n);
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

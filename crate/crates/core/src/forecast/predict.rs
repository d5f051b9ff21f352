//! Multi-step forecasting: iterated one-step predictions, direct
//! many-to-many prediction, and the multi-model scheme.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forecast::train::{one_hot, TrainMode};
use crate::neural::forward::{stack_advance, window_forward};
use crate::neural::params::{LstmStackParams, StackStates};

/// How a forecast was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ForecastMode {
    Iterated,
    Direct,
    Multi,
}

/// A numeric forecast of fixed length; symbolic runs also carry the
/// forecast symbol string.
#[derive(Clone, Debug, PartialEq)]
pub struct ForecastResult {
    pub values: Vec<f64>,
    pub mode: ForecastMode,
    pub symbols: Option<String>,
}

/// A trained scalar-input model together with the window geometry it
/// was trained under.
#[derive(Clone, Debug)]
pub struct ScalarModel {
    pub params: LstmStackParams,
    pub lag: usize,
    pub mode: TrainMode,
}

/// A trained symbol model over a one-hot alphabet.
#[derive(Clone, Debug)]
pub struct SymbolModel {
    pub params: LstmStackParams,
    pub lag: usize,
    pub alphabet: usize,
    pub mode: TrainMode,
}

/// Evaluates one window and returns the head output. Stateless models
/// start from zero states; stateful models start from `warm` states.
fn eval_window(params: &LstmStackParams, init: &StackStates, window: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0); // dropout is 0 at inference
    let out = window_forward(params, init, window, 0.0, &mut rng)?;
    Ok(out.output)
}

/// Driver shared by the scalar and symbolic iterated forecasts. The
/// feature buffer starts as the encoded history; each step evaluates
/// the last `lag` features and appends the (caller-decoded) next
/// feature. For stateful models a running state consumes the buffer
/// strictly before each window, so history is replayed exactly once
/// regardless of horizon.
fn iterate<F>(
    params: &LstmStackParams,
    lag: usize,
    mode: TrainMode,
    mut features: Vec<Vec<f64>>,
    steps: usize,
    mut decode: F,
) -> Result<()>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    if steps == 0 {
        return Err(Error::ZeroHorizon);
    }
    if features.len() < lag || lag == 0 {
        return Err(Error::LagTooLarge {
            lag,
            len: features.len(),
        });
    }
    let mut consumed = features.len() - lag;
    let mut running = StackStates::zeros(params);
    if mode == TrainMode::Stateful {
        for x in &features[..consumed] {
            stack_advance(params, &mut running, x)?;
        }
    }
    for _ in 0..steps {
        let init = match mode {
            TrainMode::Stateless => StackStates::zeros(params),
            TrainMode::Stateful => running.clone(),
        };
        let window = features[consumed..consumed + lag].to_vec();
        let output = eval_window(params, &init, &window)?;
        features.push(decode(&output));
        if mode == TrainMode::Stateful {
            stack_advance(params, &mut running, &features[consumed])?;
        }
        consumed += 1;
    }
    Ok(())
}

/// Iterated multi-step forecast: repeated one-step predictions, each
/// fed back as the next window's final input.
pub fn iterated_forecast(model: &ScalarModel, history: &[f64], horizon: usize) -> Result<ForecastResult> {
    let features: Vec<Vec<f64>> = history.iter().map(|&v| vec![v]).collect();
    let mut values = Vec::with_capacity(horizon);
    iterate(
        &model.params,
        model.lag,
        model.mode,
        features,
        horizon,
        |out| {
            values.push(out[0]);
            vec![out[0]]
        },
    )?;
    Ok(ForecastResult {
        values,
        mode: ForecastMode::Iterated,
        symbols: None,
    })
}

/// Iterated symbol forecast: each step picks the highest-probability
/// symbol and feeds its one-hot encoding back in.
pub fn iterated_symbols(model: &SymbolModel, history: &[usize], count: usize) -> Result<Vec<usize>> {
    let features: Vec<Vec<f64>> = history.iter().map(|&s| one_hot(s, model.alphabet)).collect();
    let alphabet = model.alphabet;
    let mut symbols = Vec::with_capacity(count);
    iterate(
        &model.params,
        model.lag,
        model.mode,
        features,
        count,
        |probs| {
            let best = argmax(probs);
            symbols.push(best);
            one_hot(best, alphabet)
        },
    )?;
    Ok(symbols)
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Direct many-to-many forecast: one evaluation of the last window
/// emits all horizon values at once.
pub fn direct_forecast(model: &ScalarModel, history: &[f64], horizon: usize) -> Result<ForecastResult> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    if model.params.output_dim() != horizon {
        return Err(Error::HorizonMismatch {
            requested: horizon,
            head: model.params.output_dim(),
        });
    }
    let values = eval_last_window(model, history)?;
    Ok(ForecastResult {
        values,
        mode: ForecastMode::Direct,
        symbols: None,
    })
}

/// Multi-model forecast: model `j` predicts step `j + 1`, all evaluated
/// on the same final window.
pub fn multi_forecast(models: &[ScalarModel], history: &[f64]) -> Result<ForecastResult> {
    if models.is_empty() {
        return Err(Error::ZeroHorizon);
    }
    let mut values = Vec::with_capacity(models.len());
    for model in models {
        if model.params.output_dim() != 1 {
            return Err(Error::HorizonMismatch {
                requested: 1,
                head: model.params.output_dim(),
            });
        }
        values.push(eval_last_window(model, history)?[0]);
    }
    Ok(ForecastResult {
        values,
        mode: ForecastMode::Multi,
        symbols: None,
    })
}

fn eval_last_window(model: &ScalarModel, history: &[f64]) -> Result<Vec<f64>> {
    if history.len() < model.lag || model.lag == 0 {
        return Err(Error::LagTooLarge {
            lag: model.lag,
            len: history.len(),
        });
    }
    let split = history.len() - model.lag;
    let mut states = StackStates::zeros(&model.params);
    if model.mode == TrainMode::Stateful {
        for &v in &history[..split] {
            stack_advance(&model.params, &mut states, &[v])?;
        }
    }
    let window: Vec<Vec<f64>> = history[split..].iter().map(|&v| vec![v]).collect();
    eval_window(&model.params, &states, &window)
}

/// Probabilities the symbol model assigns to the next symbol after the
/// final history window; exposed for inspection and tests.
pub fn symbol_step_probs(model: &SymbolModel, history: &[usize]) -> Result<Vec<f64>> {
    if history.len() < model.lag || model.lag == 0 {
        return Err(Error::LagTooLarge {
            lag: model.lag,
            len: history.len(),
        });
    }
    let features: Vec<Vec<f64>> = history.iter().map(|&s| one_hot(s, model.alphabet)).collect();
    let split = features.len() - model.lag;
    let mut states = StackStates::zeros(&model.params);
    if model.mode == TrainMode::Stateful {
        for x in &features[..split] {
            stack_advance(&model.params, &mut states, x)?;
        }
    }
    eval_window(&model.params, &states, &features[split..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::params::{init_params, HeadKind};

    fn constant_model(bias: f64) -> ScalarModel {
        // zero weights: the head always emits its bias
        let mut params = LstmStackParams::zeros(1, &[3], 1, HeadKind::Linear);
        params.head.b[0] = bias;
        ScalarModel {
            params,
            lag: 2,
            mode: TrainMode::Stateless,
        }
    }

    #[test]
    fn constant_model_continues_constantly() {
        let model = constant_model(0.7);
        let r = iterated_forecast(&model, &[0.1, 0.2, 0.3], 5).unwrap();
        assert_eq!(r.values, vec![0.7; 5]);
        assert_eq!(r.mode, ForecastMode::Iterated);
    }

    #[test]
    fn horizon_one_equals_single_window_evaluation() {
        let params = init_params(1, &[4], 1, HeadKind::Linear, 9);
        let model = ScalarModel {
            params,
            lag: 3,
            mode: TrainMode::Stateless,
        };
        let history = [0.4, -0.1, 0.9, 0.2];
        let r = iterated_forecast(&model, &history, 1).unwrap();
        let window: Vec<Vec<f64>> = history[1..].iter().map(|&v| vec![v]).collect();
        let direct = eval_window(&model.params, &StackStates::zeros(&model.params), &window).unwrap();
        assert_eq!(r.values[0], direct[0]);
    }

    #[test]
    fn stateful_and_stateless_forecasts_are_deterministic() {
        let params = init_params(1, &[4, 4], 1, HeadKind::Linear, 10);
        for mode in [TrainMode::Stateful, TrainMode::Stateless] {
            let model = ScalarModel {
                params: params.clone(),
                lag: 4,
                mode,
            };
            let history: Vec<f64> = (0..12).map(|i| (i as f64 * 0.5).sin()).collect();
            let a = iterated_forecast(&model, &history, 6).unwrap();
            let b = iterated_forecast(&model, &history, 6).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.values.len(), 6);
        }
    }

    #[test]
    fn direct_forecast_checks_head_width() {
        let params = init_params(1, &[3], 4, HeadKind::Linear, 2);
        let model = ScalarModel {
            params,
            lag: 2,
            mode: TrainMode::Stateless,
        };
        let history = [0.0, 0.5, 1.0];
        let r = direct_forecast(&model, &history, 4).unwrap();
        assert_eq!(r.values.len(), 4);
        let err = direct_forecast(&model, &history, 3).unwrap_err();
        assert!(err.to_string().contains("does not match trained head"));
    }

    #[test]
    fn direct_with_horizon_one_matches_iterated_first_step() {
        let params = init_params(1, &[3], 1, HeadKind::Linear, 21);
        let model = ScalarModel {
            params,
            lag: 3,
            mode: TrainMode::Stateless,
        };
        let history = [0.1, -0.4, 0.8, 0.05];
        let direct = direct_forecast(&model, &history, 1).unwrap();
        let iterated = iterated_forecast(&model, &history, 3).unwrap();
        assert_eq!(direct.values[0], iterated.values[0]);
    }

    #[test]
    fn multi_with_identical_models_repeats_the_one_step_forecast() {
        let params = init_params(1, &[3], 1, HeadKind::Linear, 5);
        let model = ScalarModel {
            params,
            lag: 2,
            mode: TrainMode::Stateless,
        };
        let history = [0.3, 0.6, 0.9];
        let single = iterated_forecast(&model, &history, 1).unwrap();
        let multi = multi_forecast(&[model.clone(), model.clone(), model], &history).unwrap();
        assert_eq!(multi.values, vec![single.values[0]; 3]);
        assert_eq!(multi.mode, ForecastMode::Multi);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let model = constant_model(0.0);
        assert!(matches!(
            iterated_forecast(&model, &[0.0, 0.0], 0),
            Err(Error::ZeroHorizon)
        ));
    }

    #[test]
    fn symbol_forecast_uses_argmax() {
        // zero-weight softmax head with a biased logit always emits
        // that symbol
        let mut params = LstmStackParams::zeros(3, &[2], 3, HeadKind::Softmax);
        params.head.b[2] = 1.5;
        let model = SymbolModel {
            params,
            lag: 2,
            alphabet: 3,
            mode: TrainMode::Stateless,
        };
        let syms = iterated_symbols(&model, &[0, 1, 2], 4).unwrap();
        assert_eq!(syms, vec![2, 2, 2, 2]);
        let probs = symbol_step_probs(&model, &[0, 1, 2]).unwrap();
        assert_eq!(argmax(&probs), 2);
    }
}

use std::path::Path;

use mgsp::apps::{
    classify_semisupervised, mln_spectral_cluster, short_time_mgst, ClassifierKind, ClassifyOptions, ClusterBasis,
    KChoice, MultiplexParams,
};
use mgsp::filters::{
    apply_polynomial, make_ranked_mask, spectral_filter, MaskSide, MaskSource, PassKind, PolynomialFilter,
    SpectralMask,
};
use mgsp::io::{
    fmt_num, json_text, matrix_rows, numeric_csv, read_features, read_frame, read_json, read_labels, read_matrix,
    read_network, read_numeric_csv, read_signal, NetworkFile, SpectrogramIndex,
};
use mgsp::network::{Threshold, RepresentationKind};
use mgsp::properties::{check_properties, PropertyTolerances};
use mgsp::spectral::{
    directed_joint_spectrum, hosvd, imgft_directed, imgft_joint, imgft_orderwise, imgst, joint_spectrum,
    mgft_directed, mgft_joint, mgft_orderwise, mgst, orthogonal_cp, rank_frequencies, tucker_hooi, CpOptions,
    TransformMode, TuckerOptions, TvNorm, TvScaling,
};
use mgsp::{
    gen_cyclic, gen_er_multiplex, shift, Convention, MgspError, MlnSignal, MultilayerNetwork, RepresentingTensor,
    Result,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{BasisArg, Command, PassArg, Repr, SideArg, TransformArgs};
use crate::manifest::Staged;

pub enum Status {
    Done,
    PropertiesFailed,
}

fn invalid(msg: impl Into<String>) -> MgspError {
    MgspError::InvalidArgument(msg.into())
}

fn load_network(staged: &mut Staged, path: &Path) -> Result<MultilayerNetwork> {
    staged.input(path);
    read_network(path)
}

fn representing(staged: &mut Staged, net: &MultilayerNetwork, repr: Repr) -> RepresentingTensor {
    let kind = repr.kind();
    staged.param("representation", kind);
    RepresentingTensor::new(net, kind)
}

fn load_signal(staged: &mut Staged, path: &Path, f: &RepresentingTensor) -> Result<MlnSignal> {
    staged.input(path);
    let s = read_signal(path)?;
    let (m, n) = f.dims();
    if s.layers() != m || s.entities() != n {
        return Err(MgspError::ShapeMismatch(format!(
            "{}: signal is {}×{}, network is {m}×{n}",
            path.display(),
            s.layers(),
            s.entities()
        )));
    }
    Ok(s)
}

fn matrix_csv(m: &DMatrix<f64>) -> String {
    numeric_csv(None, &matrix_rows(m))
}

/// `P Q M N` with integral layer and entity counts.
fn er_args(v: &[f64]) -> Result<(f64, f64, usize, usize)> {
    let count = |x: f64, what: &str| {
        if x >= 1.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(invalid(format!("{what} must be a positive integer, got {x}")))
        }
    };
    Ok((v[0], v[1], count(v[2], "M")?, count(v[3], "N")?))
}

fn basis_source(b: BasisArg) -> MaskSource {
    match b {
        BasisArg::Cp => MaskSource::OrderWise,
        BasisArg::Hosvd => MaskSource::Singular,
    }
}

pub fn run(command: Command) -> Result<Status> {
    let mut staged = Staged::default();
    let name = match &command {
        Command::Gen { .. } => "gen",
        Command::Flatten { .. } => "flatten",
        Command::Shift { .. } => "shift",
        Command::Spectrum { .. } => "spectrum",
        Command::Gft { .. } => "gft",
        Command::Igft { .. } => "igft",
        Command::Tv { .. } => "tv",
        Command::Filter { .. } => "filter",
        Command::Cluster { .. } => "cluster",
        Command::Classify { .. } => "classify",
        Command::Stmgst { .. } => "stmgst",
        Command::Proptest { .. } => "proptest",
    };
    let status = match command {
        Command::Gen { er, cyclic, x4, seed, out } => {
            let net = if let Some(er) = er {
                let (p, q, m, n) = er_args(&er)?;
                staged.param("er", json!({"p": p, "q": q, "M": m, "N": n}));
                staged.seed(seed);
                gen_er_multiplex(p, q, m, n, seed)?
            } else if let Some(n) = cyclic {
                staged.param("cyclic", n);
                gen_cyclic(n)?
            } else {
                debug_assert!(x4);
                staged.param("x4", true);
                mgsp::fixtures::x4()
            };
            staged.file(&out, json_text(&NetworkFile::from_network(&net))?);
            Status::Done
        }
        Command::Flatten { network, repr, entity_wise, out } => {
            let net = load_network(&mut staged, &network)?;
            let f = representing(&mut staged, &net, repr);
            let convention = if entity_wise { Convention::EntityWise } else { Convention::LayerWise };
            staged.param("convention", convention);
            staged.file(&out, matrix_csv(&f.flatten(convention).data));
            Status::Done
        }
        Command::Shift { network, signal, repr, out } => {
            let net = load_network(&mut staged, &network)?;
            let f = representing(&mut staged, &net, repr);
            let s = load_signal(&mut staged, &signal, &f)?;
            staged.file(&out, matrix_csv(shift(&f, &s)?.matrix()));
            Status::Done
        }
        Command::Spectrum { network, repr, joint, cp, hosvd: use_hosvd, tucker, ranks, norm, unit_norm, seed, out } => {
            let net = load_network(&mut staged, &network)?;
            let f = representing(&mut staged, &net, repr);
            let method = [(joint, "joint"), (cp, "cp"), (use_hosvd, "hosvd"), (tucker, "tucker")]
                .into_iter()
                .find_map(|(set, name)| set.then_some(name));
            staged.param("method", method);
            let text = if joint {
                spectrum_joint(&mut staged, &f, norm.into(), unit_norm)?
            } else if cp {
                spectrum_cp(&f)?
            } else if use_hosvd {
                spectrum_hosvd(&f)?
            } else {
                debug_assert!(tucker);
                staged.seed(seed);
                spectrum_tucker(&mut staged, &f, ranks, seed)?
            };
            staged.file(&out, text);
            Status::Done
        }
        Command::Gft { network, signal, repr, transform, out } => {
            let net = load_network(&mut staged, &network)?;
            let f = representing(&mut staged, &net, repr);
            let s = load_signal(&mut staged, &signal, &f)?;
            staged.param("transform", transform_name(transform));
            staged.file(&out, forward(&f, &s, transform)?);
            Status::Done
        }
        Command::Igft { network, coefficients, repr, transform, out } => {
            let net = load_network(&mut staged, &network)?;
            let f = representing(&mut staged, &net, repr);
            staged.input(&coefficients);
            staged.param("transform", transform_name(transform));
            let s = inverse(&f, &coefficients, transform)?;
            staged.file(&out, matrix_csv(s.matrix()));
            Status::Done
        }
        Command::Tv { network, repr, norm, unit_norm, out } => {
            let net = load_network(&mut staged, &network)?;
            let f = representing(&mut staged, &net, repr);
            let norm: TvNorm = norm.into();
            let scaling = if unit_norm { TvScaling::UnitNorm } else { TvScaling::AsComputed };
            staged.param("norm", norm);
            staged.param("scaling", scaling);
            let spec = joint_spectrum(&f)?;
            let ranking = rank_frequencies(&f, &spec, norm, scaling)?;
            staged.param("degenerate", ranking.degenerate);
            let rank = ranking.rank_of();
            let mut text = String::from("index,lambda,tv,rank\n");
            for (k, r) in rank.iter().enumerate() {
                text.push_str(&format!(
                    "{k},{},{},{r}\n",
                    fmt_num(spec.values[k]),
                    fmt_num(ranking.tv[k])
                ));
            }
            staged.file(&out, text);
            Status::Done
        }
        Command::Filter { network, signal, repr, poly, spec, keep, pass, side, basis, out } => {
            let net = load_network(&mut staged, &network)?;
            let design = if let Some(coefficients) = poly {
                FilterSpec::Polynomial { coefficients, kind: None }
            } else if let Some(path) = spec {
                staged.input(&path);
                read_json(&path)?
            } else {
                let keep = keep.expect("one design flag is required");
                ranked_mask(&net, repr, keep, pass, side, basis)?
            };
            let kind = design.kind().unwrap_or(repr.kind());
            staged.param("representation", kind);
            let f = RepresentingTensor::new(&net, kind);
            let s = load_signal(&mut staged, &signal, &f)?;
            let h = match &design {
                FilterSpec::Polynomial { coefficients, .. } => {
                    apply_polynomial(&PolynomialFilter::new(coefficients.clone(), kind)?, &f, &s)?
                }
                FilterSpec::Spectral { layer, entity, source, .. } => {
                    let mask = SpectralMask::new(layer.clone(), entity.clone(), *source)?;
                    match source {
                        MaskSource::OrderWise => spectral_filter(&s, &orthogonal_cp(&f, CpOptions::default())?, &mask)?,
                        MaskSource::Singular => spectral_filter(&s, &hosvd(&f)?, &mask)?,
                    }
                }
            };
            staged.param("filter", &design);
            staged.file(&out, matrix_csv(h.matrix()));
            Status::Done
        }
        Command::Cluster { network, features, delta, tau, basis, k, seed, out } => {
            let net = if let Some(path) = network {
                load_network(&mut staged, &path)?
            } else {
                let mut layers = Vec::with_capacity(features.len());
                for path in &features {
                    staged.input(path);
                    layers.push(read_features(path)?);
                }
                let threshold = tau.map_or(Threshold::Mean, Threshold::Value);
                staged.param("delta", delta);
                staged.param("threshold", threshold);
                mgsp::apps::build_feature_multiplex(&layers, &MultiplexParams::uniform(delta, threshold))?
            };
            let basis = match basis {
                BasisArg::Cp => ClusterBasis::OrderWiseCp,
                BasisArg::Hosvd => ClusterBasis::Singular,
            };
            staged.param("basis", basis);
            staged.param("k", k);
            staged.seed(seed);
            let r = mln_spectral_cluster(&net, k, basis, seed)?;
            if k == KChoice::Auto {
                staged.param("k_selected", r.k);
            }
            let mut text = String::from("entity,cluster\n");
            for (i, l) in r.labels.iter().enumerate() {
                text.push_str(&format!("{i},{l}\n"));
            }
            staged.file(&out, text);
            Status::Done
        }
        Command::Classify { data, labels, apf, order, delta, tau, out } => {
            staged.input(&data);
            staged.input(&labels);
            let rows = read_features(&data)?;
            let n = rows.len();
            let width = rows.first().map_or(0, Vec::len);
            if n == 0 || width == 0 {
                return Err(invalid(format!("{}: no feature rows", data.display())));
            }
            let x = DMatrix::from_fn(width, n, |r, c| rows[c][r]);
            let known = read_labels(&labels, n)?;
            let opts = ClassifyOptions {
                kind: if apf { ClassifierKind::FixedPower } else { ClassifierKind::Adaptive },
                order,
                delta,
                threshold: tau.map_or(Threshold::Mean, Threshold::Value),
                ..ClassifyOptions::default()
            };
            staged.param("options", &opts);
            let r = classify_semisupervised(&x, &known, &opts)?;
            staged.param("decision_threshold", r.decision_threshold);
            staged.param("single_class_training", r.single_class_training);
            if let Some(fit) = &r.fit {
                staged.param("coefficients", &fit.filter.coefficients);
                staged.param("training_mse", fit.mse);
            }
            let mut text = String::from("entity,score,predicted\n");
            for (i, (s, p)) in r.scores.iter().zip(&r.predicted).enumerate() {
                text.push_str(&format!("{i},{},{}\n", fmt_num(*s), *p as i64));
            }
            staged.file(&out, text);
            Status::Done
        }
        Command::Stmgst { frames, window, hop, tau, delta, channel, index, out } => {
            let mut seq = Vec::with_capacity(frames.len());
            for path in &frames {
                staged.input(path);
                seq.push(read_frame(path)?);
            }
            let opts = mgsp::apps::StftOptions {
                window,
                hop: hop.unwrap_or(window),
                tau,
                sigma: delta,
                channel: channel.into(),
            };
            staged.param("options", opts);
            let sg = short_time_mgst(&seq, &opts)?;
            let header: Vec<String> = (0..sg.window)
                .flat_map(|a| sg.labels.iter().map(move |l| format!("c{a}_{l}")))
                .collect();
            let index_path = index.unwrap_or_else(|| {
                let mut name = out.file_name().unwrap_or_default().to_os_string();
                name.push(".index.json");
                out.with_file_name(name)
            });
            let idx = SpectrogramIndex {
                window: sg.window,
                hop: sg.hop,
                layers: sg.window,
                labels: sg.labels.clone(),
                starts: sg.starts.clone(),
                energies: sg.energies(),
                csv: out.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            };
            staged.file(&out, numeric_csv(Some(&header), &sg.rows()));
            staged.file(&index_path, json_text(&idx)?);
            Status::Done
        }
        Command::Proptest { network, er, seed, repr, out } => {
            let net = if let Some(path) = network {
                load_network(&mut staged, &path)?
            } else {
                let (p, q, m, n) = er_args(&er.expect("one source is required"))?;
                staged.param("er", json!({"p": p, "q": q, "M": m, "N": n}));
                staged.seed(seed);
                gen_er_multiplex(p, q, m, n, seed)?
            };
            let f = representing(&mut staged, &net, repr);
            let tol = PropertyTolerances::default();
            staged.param("tolerances", tol);
            let report = check_properties(&f, &tol)?;
            staged.file(&out, json_text(&report)?);
            if report.passed() {
                Status::Done
            } else {
                Status::PropertiesFailed
            }
        }
    };
    for path in staged.commit(name)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(status)
}

fn spectrum_joint(staged: &mut Staged, f: &RepresentingTensor, norm: TvNorm, unit_norm: bool) -> Result<String> {
    let (m, n) = f.dims();
    if f.directed {
        let spec = directed_joint_spectrum(f)?;
        let re = |z: &DMatrix<Complex64>| matrix_rows(&z.map(|c| c.re));
        let im = |z: &DMatrix<Complex64>| matrix_rows(&z.map(|c| c.im));
        return json_text(&json!({
            "method": "joint",
            "directed": true,
            "convention": Convention::LayerWise,
            "M": m,
            "N": n,
            "values_re": spec.values.iter().map(|z| z.re).collect::<Vec<_>>(),
            "values_im": spec.values.iter().map(|z| z.im).collect::<Vec<_>>(),
            "right_re": re(&spec.right),
            "right_im": im(&spec.right),
            "left_re": re(&spec.left),
            "left_im": im(&spec.left),
        }));
    }
    let spec = joint_spectrum(f)?;
    let scaling = if unit_norm { TvScaling::UnitNorm } else { TvScaling::AsComputed };
    staged.param("norm", norm);
    staged.param("scaling", scaling);
    let ranking = rank_frequencies(f, &spec, norm, scaling)?;
    json_text(&json!({
        "method": "joint",
        "directed": false,
        "convention": spec.convention,
        "M": m,
        "N": n,
        "values": spec.values,
        "vectors": matrix_rows(&spec.vectors),
        "residual": spec.reconstruction_error(f),
        "tv": ranking.tv,
        "frequency_order": ranking.order,
        "lambda_max": ranking.lambda_max,
        "degenerate": ranking.degenerate,
    }))
}

fn spectrum_cp(f: &RepresentingTensor) -> Result<String> {
    let spec = orthogonal_cp(f, CpOptions::default())?;
    json_text(&json!({
        "method": "cp",
        "M": spec.m,
        "N": spec.n,
        "layer_basis": matrix_rows(&spec.layer_basis),
        "entity_basis": matrix_rows(&spec.entity_basis),
        "coefficients": matrix_rows(&spec.coefficients),
        "residual": spec.residual,
        "iterations": spec.iterations,
        "converged": spec.converged,
        "init": format!("{:?}", spec.init),
    }))
}

fn spectrum_hosvd(f: &RepresentingTensor) -> Result<String> {
    let spec = hosvd(f)?;
    let residual = spec.reconstruct().relative_error(f.tensor())?;
    json_text(&json!({
        "method": "hosvd",
        "M": spec.m,
        "N": spec.n,
        "layer_basis": matrix_rows(&spec.layer_basis),
        "entity_basis": matrix_rows(&spec.entity_basis),
        "layer_values": spec.layer_values,
        "entity_values": spec.entity_values,
        "residual": residual,
    }))
}

fn spectrum_tucker(staged: &mut Staged, f: &RepresentingTensor, ranks: Option<Vec<usize>>, seed: u64) -> Result<String> {
    let (m, n) = f.dims();
    let ranks: [usize; 4] = match ranks {
        Some(r) => [r[0], r[1], r[2], r[3]],
        None => [m, n.saturating_sub(1).max(1), m, n.saturating_sub(1).max(1)],
    };
    staged.param("ranks", ranks);
    let d = tucker_hooi(f, ranks, TuckerOptions { seed, ..TuckerOptions::default() })?;
    json_text(&json!({
        "method": "tucker",
        "M": m,
        "N": n,
        "ranks": d.ranks,
        "factors": d.factors.iter().map(matrix_rows).collect::<Vec<_>>(),
        "core": d.core.data(),
        "residual": d.residual,
        "history": d.history,
        "iterations": d.iterations,
        "converged": d.converged,
    }))
}

fn transform_name(t: TransformArgs) -> String {
    let basis = match t.basis {
        BasisArg::Cp => "cp",
        BasisArg::Hosvd => "hosvd",
    };
    if t.joint {
        "joint".into()
    } else if t.orderwise {
        "orderwise".into()
    } else if t.singular {
        "singular".into()
    } else if t.layer {
        format!("layer/{basis}")
    } else {
        format!("entity/{basis}")
    }
}

/// Separable transform selection: which basis and which sides.
fn separable(t: TransformArgs) -> (BasisArg, TransformMode) {
    if t.orderwise {
        (BasisArg::Cp, TransformMode::Joint)
    } else if t.singular {
        (BasisArg::Hosvd, TransformMode::Joint)
    } else if t.layer {
        (t.basis, TransformMode::Layer)
    } else {
        (t.basis, TransformMode::Entity)
    }
}

fn forward(f: &RepresentingTensor, s: &MlnSignal, t: TransformArgs) -> Result<String> {
    if t.joint {
        if f.directed {
            let spec = directed_joint_spectrum(f)?;
            let c = mgft_directed(&spec, s)?;
            let rows: Vec<Vec<f64>> = (0..c.len())
                .map(|k| vec![spec.values[k].re, spec.values[k].im, c[k].re, c[k].im])
                .collect();
            let header = ["lambda_re", "lambda_im", "coefficient_re", "coefficient_im"].map(String::from);
            return Ok(numeric_csv(Some(&header), &rows));
        }
        let spec = joint_spectrum(f)?;
        let c = mgft_joint(&spec, s)?;
        let rows: Vec<Vec<f64>> = (0..c.len()).map(|k| vec![spec.values[k], c[k]]).collect();
        return Ok(numeric_csv(Some(&["lambda".into(), "coefficient".into()]), &rows));
    }
    let (basis, mode) = separable(t);
    let c = match basis {
        BasisArg::Cp => mgft_orderwise(&orthogonal_cp(f, CpOptions::default())?, s, mode)?,
        BasisArg::Hosvd => mgst(&hosvd(f)?, s, mode)?,
    };
    Ok(matrix_csv(&c))
}

fn inverse(f: &RepresentingTensor, path: &Path, t: TransformArgs) -> Result<MlnSignal> {
    let (m, n) = f.dims();
    if t.joint {
        let rows = read_numeric_csv(path)?;
        let width = if f.directed { 4 } else { 2 };
        if rows.len() != m * n || rows.iter().any(|r| r.len() != width) {
            return Err(MgspError::ShapeMismatch(format!(
                "{}: expected {} rows of {width} columns",
                path.display(),
                m * n
            )));
        }
        if f.directed {
            let spec = directed_joint_spectrum(f)?;
            let c = DVector::from_iterator(m * n, rows.iter().map(|r| Complex64::new(r[2], r[3])));
            return imgft_directed(&spec, &c);
        }
        let spec = joint_spectrum(f)?;
        let c = DVector::from_iterator(m * n, rows.iter().map(|r| r[1]));
        return imgft_joint(&spec, &c);
    }
    let c = read_matrix(path)?;
    if c.shape() != (m, n) {
        return Err(MgspError::ShapeMismatch(format!(
            "{}: coefficients are {}×{}, network is {m}×{n}",
            path.display(),
            c.nrows(),
            c.ncols()
        )));
    }
    let (basis, mode) = separable(t);
    match basis {
        BasisArg::Cp => imgft_orderwise(&orthogonal_cp(f, CpOptions::default())?, &c, mode),
        BasisArg::Hosvd => imgst(&hosvd(f)?, &c, mode),
    }
}

/// Filter design read from JSON or built from flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum FilterSpec {
    Polynomial {
        coefficients: Vec<f64>,
        #[serde(default)]
        kind: Option<RepresentationKind>,
    },
    Spectral {
        layer: Vec<f64>,
        entity: Vec<f64>,
        source: MaskSource,
        #[serde(default)]
        kind: Option<RepresentationKind>,
    },
}

impl FilterSpec {
    fn kind(&self) -> Option<RepresentationKind> {
        match self {
            FilterSpec::Polynomial { kind, .. } | FilterSpec::Spectral { kind, .. } => *kind,
        }
    }
}

/// Ranked mask keeping `keep` components. Singular values rank the HOSVD
/// basis; for the CP basis a component's value is the norm of its
/// coefficient row (layers) or column (entities).
fn ranked_mask(
    net: &MultilayerNetwork,
    repr: Repr,
    keep: usize,
    pass: PassArg,
    side: SideArg,
    basis: BasisArg,
) -> Result<FilterSpec> {
    let f = RepresentingTensor::new(net, repr.kind());
    let (m, n) = f.dims();
    let side = match side {
        SideArg::Layer => MaskSide::Layer,
        SideArg::Entity => MaskSide::Entity,
    };
    let values = match basis {
        BasisArg::Hosvd => {
            let spec = hosvd(&f)?;
            match side {
                MaskSide::Layer => spec.layer_values,
                MaskSide::Entity => spec.entity_values,
            }
        }
        BasisArg::Cp => {
            let spec = orthogonal_cp(&f, CpOptions::default())?;
            match side {
                MaskSide::Layer => (0..m).map(|a| spec.coefficients.row(a).norm()).collect(),
                MaskSide::Entity => (0..n).map(|i| spec.coefficients.column(i).norm()).collect(),
            }
        }
    };
    let kind = match pass {
        PassArg::Low => PassKind::LowPass,
        PassArg::High => PassKind::HighPass,
    };
    let source = basis_source(basis);
    let mask = make_ranked_mask(&values, keep, kind, side, (m, n), source)?;
    Ok(FilterSpec::Spectral {
        layer: mask.layer,
        entity: mask.entity,
        source,
        kind: Some(repr.kind()),
    })
}

//! Forward and backward passes of the three forecaster architectures.
//!
//! Every network reads a flat parameter vector. Inputs are a time-major
//! `l × N` window. Layouts (row-major matrices, concatenated in order):
//!
//! - linear: `W (s × l·N)`, `b (s)`
//! - conv: `Wc (C × K × N)`, `bc (C)`, `Wo (s × L'·C)`, `bo (s)` with `L' = l - K + 1`
//! - gru: `Wz, Wr, Wh (H × N)`, `Uz, Ur, Uh (H × H)`, `bz, br, bh (H)`, `Wo (s × H)`, `bo (s)`

use super::{ModelKind, ModelSpec};

pub(crate) fn param_count(spec: &ModelSpec) -> usize {
    let (l, s, n) = (spec.lookback, spec.steps, spec.n_features);
    match spec.kind {
        ModelKind::LinearAr => s * l * n + s,
        ModelKind::Convolutional => {
            let (c, k) = (spec.conv_channels, spec.conv_kernel);
            let positions = l + 1 - k;
            c * k * n + c + s * positions * c + s
        }
        ModelKind::Recurrent => {
            let h = spec.hidden_size;
            3 * h * n + 3 * h * h + 3 * h + s * h + s
        }
    }
}

/// Fan-in of each parameter block as `(len, fan_in)`; biases have fan-in 0.
pub(crate) fn init_blocks(spec: &ModelSpec) -> Vec<(usize, usize)> {
    let (l, s, n) = (spec.lookback, spec.steps, spec.n_features);
    match spec.kind {
        ModelKind::LinearAr => vec![(s * l * n, l * n), (s, 0)],
        ModelKind::Convolutional => {
            let (c, k) = (spec.conv_channels, spec.conv_kernel);
            let p = l + 1 - k;
            vec![(c * k * n, k * n), (c, 0), (s * p * c, p * c), (s, 0)]
        }
        ModelKind::Recurrent => {
            let h = spec.hidden_size;
            vec![
                (3 * h * n, n),
                (3 * h * h, h),
                (3 * h, 0),
                (s * h, h),
                (s, 0),
            ]
        }
    }
}

pub(crate) fn forward(spec: &ModelSpec, params: &[f64], x: &[f64]) -> Vec<f64> {
    match spec.kind {
        ModelKind::LinearAr => linear_forward(spec, params, x),
        ModelKind::Convolutional => conv_forward(spec, params, x).0,
        ModelKind::Recurrent => gru_forward(spec, params, x).0,
    }
}

/// Adds `∂loss/∂θ` for one sample into `grad` and returns the sample loss
/// `mean_k (ŷ_k - y_k)²`.
pub(crate) fn loss_and_grad(spec: &ModelSpec, params: &[f64], x: &[f64], y: &[f64], grad: &mut [f64]) -> f64 {
    match spec.kind {
        ModelKind::LinearAr => {
            let out = linear_forward(spec, params, x);
            let (loss, d_out) = mse(&out, y);
            linear_backward(spec, x, &d_out, grad);
            loss
        }
        ModelKind::Convolutional => {
            let (out, cache) = conv_forward(spec, params, x);
            let (loss, d_out) = mse(&out, y);
            conv_backward(spec, params, x, &cache, &d_out, grad);
            loss
        }
        ModelKind::Recurrent => {
            let (out, cache) = gru_forward(spec, params, x);
            let (loss, d_out) = mse(&out, y);
            gru_backward(spec, params, x, &cache, &d_out, grad);
            loss
        }
    }
}

pub(crate) fn loss(spec: &ModelSpec, params: &[f64], x: &[f64], y: &[f64]) -> f64 {
    mse(&forward(spec, params, x), y).0
}

fn mse(out: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let s = out.len() as f64;
    let mut loss = 0.0;
    let d = out
        .iter()
        .zip(y)
        .map(|(o, t)| {
            let e = o - t;
            loss += e * e;
            2.0 * e / s
        })
        .collect();
    (loss / s, d)
}

/// `out[i] += Σ_j m[i·cols + j] · v[j]`
fn matvec_add(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * cols..(i + 1) * cols];
        *o += row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `out[j] += Σ_i m[i·cols + j] · v[i]`
fn matvec_t_add(m: &[f64], v: &[f64], out: &mut [f64]) {
    let cols = out.len();
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        let row = &m[i * cols..(i + 1) * cols];
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * vi;
        }
    }
}

/// `g[i·cols + j] += u[i] · v[j]`
fn outer_add(u: &[f64], v: &[f64], g: &mut [f64]) {
    let cols = v.len();
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        let row = &mut g[i * cols..(i + 1) * cols];
        for (gj, vj) in row.iter_mut().zip(v) {
            *gj += ui * vj;
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

// --- linear -----------------------------------------------------------------

fn linear_forward(spec: &ModelSpec, p: &[f64], x: &[f64]) -> Vec<f64> {
    let s = spec.steps;
    let d = x.len();
    let (w, b) = p.split_at(s * d);
    let mut out = b.to_vec();
    matvec_add(w, x, &mut out);
    out
}

fn linear_backward(spec: &ModelSpec, x: &[f64], d_out: &[f64], g: &mut [f64]) {
    let s = spec.steps;
    let (gw, gb) = g.split_at_mut(s * x.len());
    outer_add(d_out, x, gw);
    for (b, d) in gb.iter_mut().zip(d_out) {
        *b += d;
    }
}

// --- convolutional ----------------------------------------------------------

struct ConvCache {
    pre: Vec<f64>,
    act: Vec<f64>,
}

struct ConvLayout {
    channels: usize,
    kernel: usize,
    positions: usize,
    wc: usize,
    bc: usize,
    wo: usize,
}

impl ConvLayout {
    fn new(spec: &ModelSpec) -> Self {
        let (c, k, n) = (spec.conv_channels, spec.conv_kernel, spec.n_features);
        let positions = spec.lookback + 1 - k;
        let wc = c * k * n;
        Self {
            channels: c,
            kernel: k,
            positions,
            wc,
            bc: wc + c,
            wo: wc + c + spec.steps * positions * c,
        }
    }
}

fn conv_forward(spec: &ModelSpec, p: &[f64], x: &[f64]) -> (Vec<f64>, ConvCache) {
    let n = spec.n_features;
    let lay = ConvLayout::new(spec);
    let (c, k) = (lay.channels, lay.kernel);
    let wc = &p[..lay.wc];
    let bc = &p[lay.wc..lay.bc];
    let mut pre = vec![0.0; lay.positions * c];
    for pos in 0..lay.positions {
        let patch = &x[pos * n..(pos + k) * n];
        for ch in 0..c {
            let w = &wc[ch * k * n..(ch + 1) * k * n];
            pre[pos * c + ch] = bc[ch] + w.iter().zip(patch).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    let act: Vec<f64> = pre.iter().map(|&z| z.max(0.0)).collect();
    let wo = &p[lay.bc..lay.wo];
    let mut out = p[lay.wo..].to_vec();
    matvec_add(wo, &act, &mut out);
    (out, ConvCache { pre, act })
}

fn conv_backward(spec: &ModelSpec, p: &[f64], x: &[f64], cache: &ConvCache, d_out: &[f64], g: &mut [f64]) {
    let n = spec.n_features;
    let lay = ConvLayout::new(spec);
    let (c, k) = (lay.channels, lay.kernel);
    let wo = &p[lay.bc..lay.wo];

    outer_add(d_out, &cache.act, &mut g[lay.bc..lay.wo]);
    for (b, d) in g[lay.wo..].iter_mut().zip(d_out) {
        *b += d;
    }

    let mut d_act = vec![0.0; cache.act.len()];
    matvec_t_add(wo, d_out, &mut d_act);
    for pos in 0..lay.positions {
        let patch = &x[pos * n..(pos + k) * n];
        for ch in 0..c {
            let i = pos * c + ch;
            if cache.pre[i] <= 0.0 {
                continue;
            }
            let dz = d_act[i];
            for (gw, xv) in g[ch * k * n..(ch + 1) * k * n].iter_mut().zip(patch) {
                *gw += dz * xv;
            }
            g[lay.wc + ch] += dz;
        }
    }
}

// --- gated recurrent unit ---------------------------------------------------

struct GruLayout {
    h: usize,
    n: usize,
    w: usize,
    u: usize,
    b: usize,
    wo: usize,
}

impl GruLayout {
    fn new(spec: &ModelSpec) -> Self {
        let (h, n) = (spec.hidden_size, spec.n_features);
        let w = 0;
        let u = w + 3 * h * n;
        let b = u + 3 * h * h;
        let wo = b + 3 * h;
        Self { h, n, w, u, b, wo }
    }

    fn w(&self, gate: usize) -> std::ops::Range<usize> {
        let sz = self.h * self.n;
        self.w + gate * sz..self.w + (gate + 1) * sz
    }

    fn u(&self, gate: usize) -> std::ops::Range<usize> {
        let sz = self.h * self.h;
        self.u + gate * sz..self.u + (gate + 1) * sz
    }

    fn b(&self, gate: usize) -> std::ops::Range<usize> {
        self.b + gate * self.h..self.b + (gate + 1) * self.h
    }

    fn head(&self, steps: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let end = self.wo + steps * self.h;
        (self.wo..end, end..end + steps)
    }
}

const Z: usize = 0;
const R: usize = 1;
const C: usize = 2;

struct GruStep {
    h_prev: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    c: Vec<f64>,
    rh: Vec<f64>,
}

struct GruCache {
    steps: Vec<GruStep>,
    h_last: Vec<f64>,
}

fn gru_forward(spec: &ModelSpec, p: &[f64], x: &[f64]) -> (Vec<f64>, GruCache) {
    let lay = GruLayout::new(spec);
    let (h_dim, n) = (lay.h, lay.n);
    let mut h = vec![0.0; h_dim];
    let mut steps = Vec::with_capacity(spec.lookback);
    for t in 0..spec.lookback {
        let xt = &x[t * n..(t + 1) * n];
        let mut z = p[lay.b(Z)].to_vec();
        matvec_add(&p[lay.w(Z)], xt, &mut z);
        matvec_add(&p[lay.u(Z)], &h, &mut z);
        z.iter_mut().for_each(|v| *v = sigmoid(*v));

        let mut r = p[lay.b(R)].to_vec();
        matvec_add(&p[lay.w(R)], xt, &mut r);
        matvec_add(&p[lay.u(R)], &h, &mut r);
        r.iter_mut().for_each(|v| *v = sigmoid(*v));

        let rh: Vec<f64> = r.iter().zip(&h).map(|(a, b)| a * b).collect();
        let mut c = p[lay.b(C)].to_vec();
        matvec_add(&p[lay.w(C)], xt, &mut c);
        matvec_add(&p[lay.u(C)], &rh, &mut c);
        c.iter_mut().for_each(|v| *v = v.tanh());

        let h_next: Vec<f64> = (0..h_dim).map(|i| (1.0 - z[i]) * h[i] + z[i] * c[i]).collect();
        steps.push(GruStep {
            h_prev: std::mem::replace(&mut h, h_next),
            z,
            r,
            c,
            rh,
        });
    }
    let (wo, bo) = lay.head(spec.steps);
    let mut out = p[bo].to_vec();
    matvec_add(&p[wo], &h, &mut out);
    (out, GruCache { steps, h_last: h })
}

fn gru_backward(spec: &ModelSpec, p: &[f64], x: &[f64], cache: &GruCache, d_out: &[f64], g: &mut [f64]) {
    let lay = GruLayout::new(spec);
    let (h_dim, n) = (lay.h, lay.n);
    let (wo, bo) = lay.head(spec.steps);

    outer_add(d_out, &cache.h_last, &mut g[wo.clone()]);
    for (b, d) in g[bo].iter_mut().zip(d_out) {
        *b += d;
    }
    let mut dh = vec![0.0; h_dim];
    matvec_t_add(&p[wo], d_out, &mut dh);

    let mut d_pre = vec![0.0; h_dim];
    let mut d_rh = vec![0.0; h_dim];
    for t in (0..spec.lookback).rev() {
        let st = &cache.steps[t];
        let xt = &x[t * n..(t + 1) * n];
        let mut dh_prev: Vec<f64> = (0..h_dim).map(|i| dh[i] * (1.0 - st.z[i])).collect();

        // Candidate.
        for i in 0..h_dim {
            d_pre[i] = dh[i] * st.z[i] * (1.0 - st.c[i] * st.c[i]);
        }
        outer_add(&d_pre, xt, &mut g[lay.w(C)]);
        outer_add(&d_pre, &st.rh, &mut g[lay.u(C)]);
        add_into(&mut g[lay.b(C)], &d_pre);
        d_rh.iter_mut().for_each(|v| *v = 0.0);
        matvec_t_add(&p[lay.u(C)], &d_pre, &mut d_rh);
        for i in 0..h_dim {
            dh_prev[i] += d_rh[i] * st.r[i];
        }

        // Reset gate.
        for i in 0..h_dim {
            let dr = d_rh[i] * st.h_prev[i];
            d_pre[i] = dr * st.r[i] * (1.0 - st.r[i]);
        }
        outer_add(&d_pre, xt, &mut g[lay.w(R)]);
        outer_add(&d_pre, &st.h_prev, &mut g[lay.u(R)]);
        add_into(&mut g[lay.b(R)], &d_pre);
        matvec_t_add(&p[lay.u(R)], &d_pre, &mut dh_prev);

        // Update gate.
        for i in 0..h_dim {
            let dz = dh[i] * (st.c[i] - st.h_prev[i]);
            d_pre[i] = dz * st.z[i] * (1.0 - st.z[i]);
        }
        outer_add(&d_pre, xt, &mut g[lay.w(Z)]);
        outer_add(&d_pre, &st.h_prev, &mut g[lay.u(Z)]);
        add_into(&mut g[lay.b(Z)], &d_pre);
        matvec_t_add(&p[lay.u(Z)], &d_pre, &mut dh_prev);

        dh = dh_prev;
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

//! Slotted-ALOHA snapshots of the interference field as heard by observer nodes.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{attenuation, FadingParams, FadingSampler, NearFieldMode, PathLossModel};
use crate::error::{invalid, Error, Result};
use crate::pointproc::{
    nearest_in, random_walk_in_place, sample_pattern, Point, PointPattern, ProcessModel, Window,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerControl {
    /// Every transmission at unit power.
    Unit,
    /// Transmit power drawn per slot from a unit-mean exponential.
    ExponentialUnitMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacParams {
    pub p: f64,
    /// Noise power in linear units relative to the unit transmit power.
    pub noise_power: f64,
    pub power_control: PowerControl,
}

impl MacParams {
    pub fn new(p: f64, noise_power: f64) -> Self {
        Self { p, noise_power, power_control: PowerControl::Unit }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(invalid(format!("contention probability must lie in (0, 1], got {}", self.p)));
        }
        if !(self.noise_power >= 0.0) || !self.noise_power.is_finite() {
            return Err(invalid(format!("noise power must be non-negative, got {}", self.noise_power)));
        }
        Ok(())
    }
}

impl Default for MacParams {
    /// p = 0.05 and N0 = -25 dBm against a 0 dBm transmitter.
    fn default() -> Self {
        Self::new(0.05, crate::db_to_linear(-25.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub fading: FadingParams,
    pub path_loss: PathLossModel,
    pub near_field: NearFieldMode,
}

impl ChannelParams {
    pub fn new(m: f64, path_loss: PathLossModel, near_field: NearFieldMode) -> Self {
        Self { fading: FadingParams { m }, path_loss, near_field }
    }

    pub fn validate(&self) -> Result<()> {
        self.fading.validate()?;
        self.path_loss.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub channel: ChannelParams,
    pub mac: MacParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotMeasurement {
    /// Interference plus noise at the observer.
    pub total_received_power: f64,
    pub n_transmitters: usize,
    /// Largest single received component (0 when nobody transmitted).
    pub strongest_power: f64,
    /// `(transmitter index, received power)` when detail is recorded.
    pub per_transmitter_powers: Option<Vec<(usize, f64)>>,
}

impl SlotMeasurement {
    /// Rebuilds a measurement from its per-transmitter components.
    pub fn from_components(noise_power: f64, components: Vec<(usize, f64)>) -> Self {
        let total = noise_power + components.iter().map(|c| c.1).sum::<f64>();
        let strongest = components.iter().map(|c| c.1).fold(0.0, f64::max);
        Self {
            total_received_power: total,
            n_transmitters: components.len(),
            strongest_power: strongest,
            per_transmitter_powers: Some(components),
        }
    }

    /// Measurement known only through its total (e.g. read from a trace dump).
    pub fn total_only(total_received_power: f64, n_transmitters: usize) -> Self {
        Self { total_received_power, n_transmitters, strongest_power: f64::NAN, per_transmitter_powers: None }
    }

    pub fn interference(&self, noise_power: f64) -> f64 {
        self.total_received_power - noise_power
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotTrace {
    pub observer: usize,
    pub measurements: Vec<SlotMeasurement>,
    pub config: NetworkConfig,
}

impl SlotTrace {
    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn total_powers(&self) -> Vec<f64> {
        self.measurements.iter().map(|m| m.total_received_power).collect()
    }

    /// `slot,total_power,n_tx,strongest_power` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["slot", "total_power", "n_tx", "strongest_power"])?;
        for (slot, m) in self.measurements.iter().enumerate() {
            w.write_record([
                slot.to_string(),
                m.total_received_power.to_string(),
                m.n_transmitters.to_string(),
                m.strongest_power.to_string(),
            ])?;
        }
        w.flush()
    }

    /// Long-format `slot,tx_index,power` rows; slots without detail are skipped.
    pub fn write_detail_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["slot", "tx_index", "power"])?;
        for (slot, m) in self.measurements.iter().enumerate() {
            for (tx, power) in m.per_transmitter_powers.iter().flatten() {
                w.write_record([slot.to_string(), tx.to_string(), power.to_string()])?;
            }
        }
        w.flush()
    }
}

/// Where node positions come from.
#[derive(Debug, Clone, Copy)]
pub enum NodeSource<'a> {
    Model { model: ProcessModel, window: Window },
    Fixed(&'a PointPattern),
}

/// Which node listens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverPolicy {
    /// The node nearest to this location (window center when `None`).
    NearestTo(Option<Point>),
    Index(usize),
    /// An extra node added at this location; for a PPP this is the typical-point view.
    InsertedAt(Point),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub mobility_v: f64,
    pub fresh_pattern_per_slot: bool,
    pub record_detail: bool,
    pub observer: ObserverPolicy,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            mobility_v: 0.0,
            fresh_pattern_per_slot: false,
            record_detail: false,
            observer: ObserverPolicy::NearestTo(None),
        }
    }
}

struct SlotEngine {
    fading: FadingSampler,
    path_loss: PathLossModel,
    near_field: NearFieldMode,
    noise: f64,
    exp_power: bool,
    p: f64,
    log_q: f64,
}

impl SlotEngine {
    fn new(channel: &ChannelParams, mac: &MacParams) -> Result<Self> {
        channel.validate()?;
        mac.validate()?;
        Ok(Self {
            fading: FadingSampler::new(channel.fading)?,
            path_loss: channel.path_loss,
            near_field: channel.near_field,
            noise: mac.noise_power,
            exp_power: mac.power_control == PowerControl::ExponentialUnitMean,
            p: mac.p,
            log_q: (1.0 - mac.p).ln(),
        })
    }

    /// Gap to the next ALOHA transmitter in index order (geometric skipping,
    /// equivalent to an independent coin per node).
    #[inline]
    fn skip<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.p >= 1.0 {
            return 0;
        }
        let u = 1.0 - rng.random::<f64>();
        (u.ln() / self.log_q).floor() as usize
    }

    #[inline]
    fn link(&self, tx: Point, rx: Point) -> Option<f64> {
        attenuation(&self.path_loss, self.near_field, tx, rx)
    }

    /// One slot heard by every observer. `gain(o, i)` is the deterministic
    /// attenuation from node `i` to observer `o`. Every node runs ALOHA; an
    /// observer records the field of all transmitters other than itself.
    fn slot<R, G>(
        &self,
        n_nodes: usize,
        observers: &[usize],
        gain: G,
        record_detail: bool,
        rng: &mut R,
    ) -> Vec<SlotMeasurement>
    where
        R: Rng + ?Sized,
        G: Fn(usize, usize) -> Option<f64>,
    {
        let mut out: Vec<SlotMeasurement> = observers
            .iter()
            .map(|_| SlotMeasurement {
                total_received_power: self.noise,
                n_transmitters: 0,
                strongest_power: 0.0,
                per_transmitter_powers: record_detail.then(Vec::new),
            })
            .collect();
        let mut i = self.skip(rng);
        while i < n_nodes {
            if !(observers.len() == 1 && observers[0] == i) {
                let power = if self.exp_power { -(1.0 - rng.random::<f64>()).ln() } else { 1.0 };
                for (o, meas) in out.iter_mut().enumerate() {
                    if observers[o] == i {
                        continue;
                    }
                    meas.n_transmitters += 1;
                    let Some(att) = gain(o, i) else { continue };
                    let rx = power * self.fading.sample(rng) * att;
                    meas.total_received_power += rx;
                    if rx > meas.strongest_power {
                        meas.strongest_power = rx;
                    }
                    if let Some(d) = meas.per_transmitter_powers.as_mut() {
                        d.push((i, rx));
                    }
                }
            }
            i = i.saturating_add(1 + self.skip(rng));
        }
        out
    }
}

fn check_observers(observers: &[usize], len: usize) -> Result<()> {
    let mut mask = vec![false; len];
    for &o in observers {
        if o >= len {
            return Err(Error::InvalidObserver { index: o, len });
        }
        if mask[o] {
            return Err(Error::DuplicateObserver(o));
        }
        mask[o] = true;
    }
    Ok(())
}

/// One ALOHA slot on a fixed pattern, always with per-transmitter detail.
/// The observer listens and never transmits.
pub fn run_slot<R: Rng + ?Sized>(
    pattern: &PointPattern,
    observer: usize,
    channel: &ChannelParams,
    mac: &MacParams,
    rng: &mut R,
) -> Result<SlotMeasurement> {
    let engine = SlotEngine::new(channel, mac)?;
    check_observers(&[observer], pattern.len())?;
    let rx = pattern.points[observer];
    let pts = &pattern.points;
    let mut out = engine.slot(pts.len(), &[observer], |_, i| engine.link(pts[i], rx), true, rng);
    Ok(out.remove(0))
}

fn resolve_observer(points: &mut Vec<Point>, window: &Window, policy: ObserverPolicy) -> Result<usize> {
    match policy {
        ObserverPolicy::NearestTo(target) => {
            nearest_in(points, target.unwrap_or_else(|| window.center())).ok_or(Error::EmptyPattern)
        }
        ObserverPolicy::Index(i) => {
            if i < points.len() {
                Ok(i)
            } else {
                Err(Error::InvalidObserver { index: i, len: points.len() })
            }
        }
        ObserverPolicy::InsertedAt(p) => {
            points.push(p);
            Ok(points.len() - 1)
        }
    }
}

/// Records `n_slots` measurements at one observer.
///
/// With a fixed pattern (or a model sampled once) the geometry is shared by
/// all slots and only ALOHA and fading vary, unless `mobility_v > 0`, in which
/// case every node, observer included, takes a random-walk step between slots.
/// `fresh_pattern_per_slot` draws an independent pattern for every slot.
pub fn run_trace<R: Rng + ?Sized>(
    source: NodeSource<'_>,
    channel: &ChannelParams,
    mac: &MacParams,
    n_slots: usize,
    options: TraceOptions,
    rng: &mut R,
) -> Result<SlotTrace> {
    if n_slots == 0 {
        return Err(invalid("a trace needs at least one slot"));
    }
    let config = NetworkConfig { channel: *channel, mac: *mac };
    if options.fresh_pattern_per_slot {
        let NodeSource::Model { model, window } = source else {
            return Err(invalid("fresh patterns per slot need a process model, not a fixed pattern"));
        };
        let engine = SlotEngine::new(channel, mac)?;
        let mut measurements = Vec::with_capacity(n_slots);
        let mut observer = 0;
        for _ in 0..n_slots {
            let mut points = sample_pattern(&model, &window, rng)?.points;
            observer = resolve_observer(&mut points, &window, options.observer)?;
            let rx = points[observer];
            let pts = &points;
            let mut m = engine.slot(
                pts.len(),
                &[observer],
                |_, i| engine.link(pts[i], rx),
                options.record_detail,
                rng,
            );
            measurements.push(m.remove(0));
        }
        return Ok(SlotTrace { observer, measurements, config });
    }

    let mut pattern = match source {
        NodeSource::Model { model, window } => sample_pattern(&model, &window, rng)?,
        NodeSource::Fixed(p) => p.clone(),
    };
    let window = pattern.window;
    let observer = resolve_observer(&mut pattern.points, &window, options.observer)?;
    let mut traces = run_multi_trace(&pattern, &[observer], channel, mac, n_slots, options.mobility_v, options.record_detail, rng)?;
    Ok(traces.remove(0))
}

/// Records the same slots at several observers of one realization, as used by
/// the coordination scheme. Observers take part in ALOHA like any other node;
/// each one's measurement is the field of the other transmitters, whether or
/// not it transmitted itself. With a single observer this is the same as
/// `run_trace`.
#[allow(clippy::too_many_arguments)]
pub fn run_multi_trace<R: Rng + ?Sized>(
    pattern: &PointPattern,
    observers: &[usize],
    channel: &ChannelParams,
    mac: &MacParams,
    n_slots: usize,
    mobility_v: f64,
    record_detail: bool,
    rng: &mut R,
) -> Result<Vec<SlotTrace>> {
    if n_slots == 0 {
        return Err(invalid("a trace needs at least one slot"));
    }
    if observers.is_empty() {
        return Err(invalid("at least one observer is required"));
    }
    if !(mobility_v >= 0.0) || !mobility_v.is_finite() {
        return Err(invalid(format!("speed must be non-negative, got {mobility_v}")));
    }
    let engine = SlotEngine::new(channel, mac)?;
    check_observers(observers, pattern.len())?;
    let config = NetworkConfig { channel: *channel, mac: *mac };
    let n = pattern.len();
    let mut per_observer: Vec<Vec<SlotMeasurement>> = observers.iter().map(|_| Vec::with_capacity(n_slots)).collect();

    if mobility_v == 0.0 {
        let pts = &pattern.points;
        let gains: Vec<Vec<Option<f64>>> = observers
            .iter()
            .map(|&o| pts.iter().map(|&q| engine.link(q, pts[o])).collect())
            .collect();
        for _ in 0..n_slots {
            let slot = engine.slot(n, observers, |o, i| gains[o][i], record_detail, rng);
            for (acc, m) in per_observer.iter_mut().zip(slot) {
                acc.push(m);
            }
        }
    } else {
        let mut positions = pattern.points.clone();
        for s in 0..n_slots {
            if s > 0 {
                random_walk_in_place(&mut positions, &pattern.window, mobility_v, rng)?;
            }
            let pts = &positions;
            let slot = engine.slot(n, observers, |o, i| engine.link(pts[i], pts[observers[o]]), record_detail, rng);
            for (acc, m) in per_observer.iter_mut().zip(slot) {
                acc.push(m);
            }
        }
    }

    Ok(observers
        .iter()
        .zip(per_observer)
        .map(|(&observer, measurements)| SlotTrace { observer, measurements, config })
        .collect())
}

/// Number of transmitters whose SINR at the observer exceeds `theta`
/// (strict inequality; noise counts towards the denominator).
pub fn transmitting_set_count(meas: &SlotMeasurement, theta: f64) -> Result<usize> {
    if !(theta > 0.0) {
        return Err(invalid(format!("threshold must be positive, got {theta}")));
    }
    let detail = meas.per_transmitter_powers.as_ref().ok_or(Error::MissingDetail)?;
    let total = meas.total_received_power;
    Ok(detail.iter().filter(|(_, p)| *p > theta * (total - p)).count())
}

/// Whether the strongest transmitter is decodable. For `theta >= 1` at most one
/// transmitter can be, and only the strongest, so this equals the transmitting-set
/// cardinality without needing per-transmitter detail.
pub fn strongest_decodable(meas: &SlotMeasurement, theta: f64) -> Result<bool> {
    if !(theta >= 1.0) {
        return Err(invalid(format!("the strongest-link shortcut needs theta >= 1, got {theta}")));
    }
    let s = meas.strongest_power;
    if s.is_nan() {
        return Ok(transmitting_set_count(meas, theta)? == 1);
    }
    Ok(meas.n_transmitters > 0 && s > theta * (meas.total_received_power - s))
}

//! Photons as a polarization state plus classical labels: wavelength,
//! time slot, and intensity.
//!
//! Labels are the side channel this simulator is about. An eavesdropper
//! who can nudge a label (here, wavelength) without touching polarization
//! gains a way to tell two otherwise interchangeable photons apart later.
//! Honest parties only ever edit labels through the scrub operations; the
//! attack edits them through [`shift_wavelength`].
//!
//! Every photon also carries a [`PhotonId`] assigned at emission. The id
//! is bookkeeping for trace audits in tests and the harness; it is not a
//! physical degree of freedom, no party or adversary decision may depend
//! on it, and [`read_labels`] deliberately excludes it.

use crate::quantum::PolarizationState;
use serde::Serialize;
use thiserror::Error;

/// Wavelength in nanometres of the telecom C-band default.
pub const DEFAULT_WAVELENGTH_NM: f64 = 1550.0;

/// Canonical time slot photons are scrubbed to.
pub const DEFAULT_TIME_SLOT: f64 = 0.0;

/// Reference single-photon intensity in detector units.
pub const DEFAULT_INTENSITY: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhotonError {
    #[error("wavelength shift of {delta} nm takes {wavelength} nm to a nonpositive value")]
    WavelengthOutOfRange { wavelength: f64, delta: f64 },
    #[error("label set invalid: wavelength {wavelength} nm, intensity {intensity}")]
    InvalidLabels { wavelength: f64, intensity: f64 },
}

/// The classical labels riding along with one photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabelSet {
    /// Wavelength in nanometres; always positive.
    pub wavelength: f64,
    /// Temporal mode, in slot units; emission order is slot order.
    pub time_slot: f64,
    /// Mean photon-number intensity; never negative.
    pub intensity: f64,
}

impl LabelSet {
    pub fn new(wavelength: f64, time_slot: f64, intensity: f64) -> Result<Self, PhotonError> {
        let labels = Self {
            wavelength,
            time_slot,
            intensity,
        };
        labels.validate()?;
        Ok(labels)
    }

    pub fn validate(&self) -> Result<(), PhotonError> {
        if self.wavelength <= 0.0 || !self.wavelength.is_finite() || self.intensity < 0.0 {
            return Err(PhotonError::InvalidLabels {
                wavelength: self.wavelength,
                intensity: self.intensity,
            });
        }
        Ok(())
    }

    pub fn with_time_slot(mut self, time_slot: f64) -> Self {
        self.time_slot = time_slot;
        self
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        Self {
            wavelength: DEFAULT_WAVELENGTH_NM,
            time_slot: DEFAULT_TIME_SLOT,
            intensity: DEFAULT_INTENSITY,
        }
    }
}

/// Emission-order identity used only for trace audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonId(u64);

/// Monotonic [`PhotonId`] source; one per simulated session.
#[derive(Debug, Default)]
pub struct PhotonIds(u64);

impl PhotonIds {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_id(&mut self) -> PhotonId {
        let id = PhotonId(self.0);
        self.0 += 1;
        id
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photon {
    pol: PolarizationState,
    labels: LabelSet,
    id: PhotonId,
}

impl Photon {
    pub fn new(pol: PolarizationState, labels: LabelSet, ids: &mut PhotonIds) -> Self {
        Self {
            pol,
            labels,
            id: ids.next_id(),
        }
    }

    pub fn pol(&self) -> &PolarizationState {
        &self.pol
    }

    /// Replaces the polarization, keeping labels and identity. This models
    /// an in-flight unitary acting on the photon.
    pub fn with_pol(mut self, pol: PolarizationState) -> Self {
        self.pol = pol;
        self
    }

    /// Audit-only identity; see the module notes. Not part of any
    /// party-facing view.
    pub fn trace_id(&self) -> PhotonId {
        self.id
    }
}

/// Non-demolition readout of the classical labels. Polarization is not
/// disturbed and the photon keeps flying.
pub fn read_labels(photon: &Photon) -> LabelSet {
    photon.labels
}

/// Offsets the wavelength by `delta` nanometres, leaving polarization and
/// the other labels alone. Fails if the result would be nonpositive.
pub fn shift_wavelength(photon: Photon, delta: f64) -> Result<Photon, PhotonError> {
    let shifted = photon.labels.wavelength + delta;
    if shifted <= 0.0 || !shifted.is_finite() {
        return Err(PhotonError::WavelengthOutOfRange {
            wavelength: photon.labels.wavelength,
            delta,
        });
    }
    let mut photon = photon;
    photon.labels.wavelength = shifted;
    Ok(photon)
}

/// Resets the temporal label to `canonical_slot`, erasing emission-order
/// information. Wavelength, intensity, polarization, and identity persist.
pub fn scrub_temporal(photon: Photon, canonical_slot: f64) -> Photon {
    let mut photon = photon;
    photon.labels.time_slot = canonical_slot;
    photon
}

/// Re-emits the photon with the full canonical label set, preserving the
/// polarization state exactly. This idealizes transferring the state onto
/// a fresh carrier (teleportation onto a local photon), so the output gets
/// a fresh identity: no label of the input survives.
pub fn scrub_all_labels(photon: Photon, canonical: LabelSet, ids: &mut PhotonIds) -> Photon {
    Photon::new(photon.pol, canonical, ids)
}

/// Detector-side sanity check: passes iff exactly `expected_count` photons
/// arrived and every intensity is within `tol` of `expected_intensity`.
pub fn intensity_check(
    photons: &[Photon],
    expected_count: usize,
    expected_intensity: f64,
    tol: f64,
) -> bool {
    photons.len() == expected_count
        && photons
            .iter()
            .all(|p| (p.labels.intensity - expected_intensity).abs() <= tol)
}

/// Which pulse of a two-pulse round, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseIndex {
    First,
    Second,
}

impl PulseIndex {
    pub fn other(self) -> Self {
        match self {
            PulseIndex::First => PulseIndex::Second,
            PulseIndex::Second => PulseIndex::First,
        }
    }

    /// Bit encoding used on the classical channel: `false` is the first
    /// pulse.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            PulseIndex::Second
        } else {
            PulseIndex::First
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, PulseIndex::Second)
    }
}

/// The two photons of one round, in emission order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePair {
    first: Photon,
    second: Photon,
}

impl PulsePair {
    /// Emission-order invariant: the first photon occupies the earlier
    /// time slot.
    pub fn new(first: Photon, second: Photon) -> Self {
        assert!(
            first.labels.time_slot < second.labels.time_slot,
            "pulse pair emitted out of temporal order"
        );
        Self { first, second }
    }

    pub fn first(&self) -> &Photon {
        &self.first
    }

    pub fn second(&self) -> &Photon {
        &self.second
    }

    pub fn get(&self, index: PulseIndex) -> &Photon {
        match index {
            PulseIndex::First => &self.first,
            PulseIndex::Second => &self.second,
        }
    }

    pub fn into_photons(self) -> (Photon, Photon) {
        (self.first, self.second)
    }

    /// Applies a fallible polarization map to both photons, preserving
    /// labels and identities.
    pub fn try_map_pols<E>(
        self,
        mut f: impl FnMut(PulseIndex, &PolarizationState) -> Result<PolarizationState, E>,
    ) -> Result<Self, E> {
        let first_pol = f(PulseIndex::First, &self.first.pol)?;
        let second_pol = f(PulseIndex::Second, &self.second.pol)?;
        Ok(Self {
            first: self.first.with_pol(first_pol),
            second: self.second.with_pol(second_pol),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::prepare;

    fn test_photon(ids: &mut PhotonIds) -> Photon {
        Photon::new(prepare(0.3), LabelSet::default(), ids)
    }

    #[test]
    fn default_labels_are_telecom_single_photon() {
        let labels = LabelSet::default();
        assert_eq!(labels.wavelength, 1550.0);
        assert_eq!(labels.time_slot, 0.0);
        assert_eq!(labels.intensity, 1.0);
        assert!(labels.validate().is_ok());
    }

    #[test]
    fn label_set_rejects_nonphysical_values() {
        assert!(LabelSet::new(0.0, 0.0, 1.0).is_err());
        assert!(LabelSet::new(-5.0, 0.0, 1.0).is_err());
        assert!(LabelSet::new(1550.0, 0.0, -0.1).is_err());
        assert!(LabelSet::new(1550.0, -3.0, 0.0).is_ok());
    }

    #[test]
    fn shift_wavelength_moves_only_the_wavelength() {
        let mut ids = PhotonIds::new();
        let photon = test_photon(&mut ids);
        let before = *photon.pol();
        let id = photon.trace_id();
        let shifted = shift_wavelength(photon, 0.25).unwrap();
        let labels = read_labels(&shifted);
        assert_eq!(labels.wavelength, 1550.25);
        assert_eq!(labels.time_slot, 0.0);
        assert_eq!(labels.intensity, 1.0);
        assert_eq!(*shifted.pol(), before);
        assert_eq!(shifted.trace_id(), id);
    }

    #[test]
    fn shift_wavelength_rejects_nonpositive_result() {
        let mut ids = PhotonIds::new();
        let photon = test_photon(&mut ids);
        let err = shift_wavelength(photon, -1550.0).unwrap_err();
        assert!(matches!(err, PhotonError::WavelengthOutOfRange { .. }));
        let photon = test_photon(&mut ids);
        assert!(shift_wavelength(photon, -2000.0).is_err());
    }

    #[test]
    fn scrub_temporal_resets_only_the_time_slot() {
        let mut ids = PhotonIds::new();
        let photon = Photon::new(
            prepare(1.1),
            LabelSet::new(1550.4, 2.0, 1.0).unwrap(),
            &mut ids,
        );
        let id = photon.trace_id();
        let scrubbed = scrub_temporal(photon, 0.0);
        let labels = read_labels(&scrubbed);
        assert_eq!(labels.time_slot, 0.0);
        assert_eq!(labels.wavelength, 1550.4);
        assert_eq!(scrubbed.trace_id(), id);
    }

    #[test]
    fn scrub_all_labels_keeps_polarization_and_nothing_else() {
        let mut ids = PhotonIds::new();
        let photon = Photon::new(
            prepare(0.77),
            LabelSet::new(1550.1, 2.0, 1.0).unwrap(),
            &mut ids,
        );
        let pol_before = *photon.pol();
        let id_before = photon.trace_id();
        let scrubbed = scrub_all_labels(photon, LabelSet::default(), &mut ids);
        assert_eq!(read_labels(&scrubbed), LabelSet::default());
        assert_eq!(*scrubbed.pol(), pol_before);
        assert_ne!(scrubbed.trace_id(), id_before);
    }

    #[test]
    fn intensity_check_gates_on_count_and_tolerance() {
        let mut ids = PhotonIds::new();
        let a = test_photon(&mut ids);
        let b = test_photon(&mut ids);
        assert!(intensity_check(&[a, b], 2, 1.0, 0.01));
        assert!(!intensity_check(&[a, b], 1, 1.0, 0.01));
        assert!(!intensity_check(&[a], 2, 1.0, 0.01));
        assert!(intensity_check(&[], 0, 1.0, 0.01));

        let dim = Photon::new(
            prepare(0.0),
            LabelSet::new(1550.0, 0.0, 0.5).unwrap(),
            &mut ids,
        );
        assert!(!intensity_check(&[a, dim], 2, 1.0, 0.01));
        assert!(intensity_check(&[a, dim], 2, 1.0, 0.6));
    }

    #[test]
    fn pulse_pair_exposes_photons_by_index() {
        let mut ids = PhotonIds::new();
        let first = Photon::new(
            prepare(0.1),
            LabelSet::default().with_time_slot(1.0),
            &mut ids,
        );
        let second = Photon::new(
            prepare(0.2),
            LabelSet::default().with_time_slot(2.0),
            &mut ids,
        );
        let pair = PulsePair::new(first, second);
        assert_eq!(pair.get(PulseIndex::First), pair.first());
        assert_eq!(pair.get(PulseIndex::Second), pair.second());
        assert_eq!(read_labels(pair.first()).time_slot, 1.0);
    }

    #[test]
    #[should_panic(expected = "temporal order")]
    fn pulse_pair_rejects_out_of_order_emission() {
        let mut ids = PhotonIds::new();
        let late = Photon::new(
            prepare(0.1),
            LabelSet::default().with_time_slot(2.0),
            &mut ids,
        );
        let early = Photon::new(
            prepare(0.2),
            LabelSet::default().with_time_slot(1.0),
            &mut ids,
        );
        PulsePair::new(late, early);
    }

    #[test]
    fn pulse_index_bit_round_trips() {
        assert_eq!(PulseIndex::from_bit(false), PulseIndex::First);
        assert_eq!(PulseIndex::from_bit(true), PulseIndex::Second);
        for index in [PulseIndex::First, PulseIndex::Second] {
            assert_eq!(PulseIndex::from_bit(index.bit()), index);
            assert_eq!(index.other().other(), index);
            assert_ne!(index.other(), index);
        }
    }

    #[test]
    fn photon_ids_are_unique_and_ordered() {
        let mut ids = PhotonIds::new();
        let a = ids.next_id();
        let b = ids.next_id();
        assert_ne!(a, b);
    }
}

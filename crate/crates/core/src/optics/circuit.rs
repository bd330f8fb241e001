use num_complex::Complex;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::quantum::{Effect, Pom};
use crate::rng::stream_rng;
use crate::scalar::{as_f64, cast, Scalar};

use super::element::{element_unitary, ElementKind, ModeId, OpticalElement, PhaseTarget};

/// A detector group: two ordered spatial modes forming one output port's
/// path qubit (first mode = logical 0).
#[derive(Clone, Debug, PartialEq)]
pub struct Port {
    pub label: String,
    pub modes: (ModeId, ModeId),
}

/// A single-photon linear-optical network over labeled spatial modes,
/// optionally carrying polarization.
///
/// The single-photon state space is spanned by (polarization x mode)
/// amplitudes, indexed pol * n_modes + mode with v = 0, h = 1 (or just the
/// mode index for unpolarized circuits). Vacuum ancilla inputs of beam
/// splitters are ordinary modes with zero input amplitude, which makes the
/// per-port Kraus operators plain sub-matrix restrictions of the compiled
/// global unitary.
///
/// Elements are listed in propagation order; the compiled unitary is the
/// reverse-order product of their embeddings.
#[derive(Clone, Debug)]
pub struct PhotonicCircuit<T> {
    polarized: bool,
    mode_names: Vec<String>,
    elements: Vec<OpticalElement<T>>,
    input: (ModeId, ModeId),
    ports: Vec<Port>,
}

impl<T: Scalar> PhotonicCircuit<T> {
    pub fn new(
        polarized: bool,
        mode_names: Vec<String>,
        elements: Vec<OpticalElement<T>>,
        input: (ModeId, ModeId),
        ports: Vec<Port>,
    ) -> Result<Self> {
        let n = mode_names.len();
        if n < 2 {
            return Err(Error::InvalidCircuit("need at least two modes".into()));
        }
        for (i, name) in mode_names.iter().enumerate() {
            if mode_names[..i].contains(name) {
                return Err(Error::InvalidCircuit(format!(
                    "duplicate mode name '{name}'"
                )));
            }
        }
        if input.0 >= n || input.1 >= n || input.0 == input.1 {
            return Err(Error::InvalidCircuit("invalid input mode pair".into()));
        }
        for e in &elements {
            e.validate()?;
            if e.modes.iter().any(|&m| m >= n) {
                return Err(Error::InvalidCircuit(
                    "element references unknown mode".into(),
                ));
            }
            if !polarized && e.needs_polarization() {
                return Err(Error::InvalidCircuit(
                    "polarization element in an unpolarized circuit".into(),
                ));
            }
        }
        if ports.is_empty() {
            return Err(Error::InvalidCircuit("no output ports".into()));
        }
        for (i, p) in ports.iter().enumerate() {
            if p.modes.0 >= n || p.modes.1 >= n || p.modes.0 == p.modes.1 {
                return Err(Error::InvalidCircuit(format!(
                    "port '{}' has an invalid mode pair",
                    p.label
                )));
            }
            if ports[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::InvalidCircuit(format!(
                    "duplicate port label '{}'",
                    p.label
                )));
            }
        }
        let circuit = Self {
            polarized,
            mode_names,
            elements,
            input,
            ports,
        };
        let residual = circuit.compile().unitarity_residual();
        if residual > cast::<T>(1e-10) {
            return Err(Error::InvalidCircuit(format!(
                "compiled transformation not unitary: residual {}",
                as_f64(residual)
            )));
        }
        Ok(circuit)
    }

    pub fn polarized(&self) -> bool {
        self.polarized
    }

    pub fn mode_names(&self) -> &[String] {
        &self.mode_names
    }

    pub fn elements(&self) -> &[OpticalElement<T>] {
        &self.elements
    }

    pub fn input(&self) -> (ModeId, ModeId) {
        self.input
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    fn n_modes(&self) -> usize {
        self.mode_names.len()
    }

    /// Dimension of the single-photon state space.
    pub fn state_dim(&self) -> usize {
        self.n_modes() * if self.polarized { 2 } else { 1 }
    }

    fn state_index(&self, pol: usize, mode: ModeId) -> usize {
        pol * self.n_modes() + mode
    }

    /// Basis states of one port in computational order: (v a, v b, h a, h b)
    /// for polarized circuits, (a, b) otherwise.
    fn port_state_indices(&self, port: &Port) -> Vec<usize> {
        let (a, b) = port.modes;
        if self.polarized {
            vec![
                self.state_index(0, a),
                self.state_index(0, b),
                self.state_index(1, a),
                self.state_index(1, b),
            ]
        } else {
            vec![a, b]
        }
    }

    fn input_state_indices(&self) -> Vec<usize> {
        self.port_state_indices(&Port {
            label: String::new(),
            modes: self.input,
        })
    }

    fn embed(&self, element: &OpticalElement<T>) -> ComplexMatrix<T> {
        let dim = self.state_dim();
        let mut u = ComplexMatrix::identity(dim);
        let local = element_unitary(element).expect("validated at construction");
        match &element.kind {
            ElementKind::BeamSplitter { .. } => {
                let (a, b) = (element.modes[0], element.modes[1]);
                let pols = if self.polarized { 0..2 } else { 0..1 };
                for pol in pols {
                    let idx = [self.state_index(pol, a), self.state_index(pol, b)];
                    for i in 0..2 {
                        for j in 0..2 {
                            u.set(idx[i], idx[j], local[(i, j)]);
                        }
                    }
                }
            }
            ElementKind::Ppbs { .. } => {
                let (a, b) = (element.modes[0], element.modes[1]);
                let idx = [
                    self.state_index(0, a),
                    self.state_index(0, b),
                    self.state_index(1, a),
                    self.state_index(1, b),
                ];
                for i in 0..4 {
                    for j in 0..4 {
                        u.set(idx[i], idx[j], local[(i, j)]);
                    }
                }
            }
            ElementKind::HalfWavePlate { .. } => {
                let m = element.modes[0];
                let idx = [self.state_index(0, m), self.state_index(1, m)];
                for i in 0..2 {
                    for j in 0..2 {
                        u.set(idx[i], idx[j], local[(i, j)]);
                    }
                }
            }
            ElementKind::PhaseShifter { phase, target } => {
                let m = element.modes[0];
                let ph = Complex::new(phase.cos(), phase.sin());
                match (target, self.polarized) {
                    (PhaseTarget::Path, true) => {
                        u.set(self.state_index(0, m), self.state_index(0, m), ph);
                        u.set(self.state_index(1, m), self.state_index(1, m), ph);
                    }
                    (PhaseTarget::Path, false) => {
                        u.set(m, m, ph);
                    }
                    (PhaseTarget::PolV, _) => {
                        u.set(self.state_index(0, m), self.state_index(0, m), ph);
                    }
                    (PhaseTarget::PolH, _) => {
                        u.set(self.state_index(1, m), self.state_index(1, m), ph);
                    }
                }
            }
        }
        u
    }

    fn compile(&self) -> ComplexMatrix<T> {
        let mut u = ComplexMatrix::identity(self.state_dim());
        for element in &self.elements {
            u = self.embed(element).matmul(&u);
        }
        u
    }

    /// The compiled global mode transformation.
    pub fn unitary(&self) -> ComplexMatrix<T> {
        self.compile()
    }

    fn check_ports_partition(&self) -> Result<()> {
        let mut seen = vec![false; self.n_modes()];
        for p in &self.ports {
            for m in [p.modes.0, p.modes.1] {
                if seen[m] {
                    return Err(Error::InvalidCircuit(format!(
                        "mode '{}' appears in more than one port",
                        self.mode_names[m]
                    )));
                }
                seen[m] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidCircuit(
                "ports do not cover every terminal mode".into(),
            ));
        }
        Ok(())
    }

    /// Restriction of the global unitary to (input qubit space -> port
    /// qubit space), one operator per port. Completeness sum K^dagger K = 1
    /// holds whenever the ports partition the modes.
    pub fn port_kraus(&self) -> Result<Vec<PortKraus<T>>> {
        self.check_ports_partition()?;
        let u = self.compile();
        let inputs = self.input_state_indices();
        let mut out = Vec::with_capacity(self.ports.len());
        for port in &self.ports {
            let rows = self.port_state_indices(port);
            let k =
                ComplexMatrix::from_fn(rows.len(), inputs.len(), |i, j| u[(rows[i], inputs[j])]);
            out.push(PortKraus {
                port: port.label.clone(),
                matrix: k,
            });
        }
        let d = inputs.len();
        let mut sum = ComplexMatrix::zeros(d, d);
        for pk in &out {
            sum = sum.add(&pk.matrix.adjoint().matmul(&pk.matrix));
        }
        let residual = sum.sub(&ComplexMatrix::identity(d)).max_abs_entry();
        if residual > cast::<T>(1e-10) {
            return Err(Error::InvalidCircuit(format!(
                "port Kraus completeness residual {}",
                as_f64(residual)
            )));
        }
        Ok(out)
    }

    /// The POM realized by photodetectors on every port basis state:
    /// outcome (port k, result m) has effect K_k^dagger |m><m| K_k.
    pub fn detection_pom(&self) -> Result<Pom<T>> {
        let kraus = self.port_kraus()?;
        let mut effects = Vec::new();
        for pk in &kraus {
            let k = &pk.matrix;
            for m in 0..k.rows() {
                let effect =
                    ComplexMatrix::from_fn(k.cols(), k.cols(), |a, b| k[(m, a)].conj() * k[(m, b)]);
                effects.push(Effect::new(
                    effect.hermitized(),
                    format!("p{}r{}", pk.port, m + 1),
                )?);
            }
        }
        Pom::new(effects)
    }

    /// A copy of the circuit with independent Gaussian phase drifts (std
    /// `sigma`, radians) inserted on every mode segment: after each
    /// element, each mode it touches gets a path phase shifter. Zero sigma
    /// inserts zero phases and leaves the compiled transformation
    /// unchanged. Draws come from stream 0 of `seed`.
    pub fn perturb_phases(&self, sigma: T, seed: u64) -> Result<Self> {
        if sigma < T::zero() {
            return Err(Error::InvalidCircuit("negative phase sigma".into()));
        }
        let mut rng = stream_rng(seed, 0);
        let normal = Normal::new(0.0, as_f64(sigma))
            .map_err(|e| Error::InvalidCircuit(format!("phase noise: {e}")))?;
        let mut elements = Vec::with_capacity(self.elements.len() * 3);
        for element in &self.elements {
            elements.push(element.clone());
            for &mode in &element.modes {
                let delta: f64 = normal.sample(&mut rng);
                elements.push(OpticalElement::path_phase(cast::<T>(delta), mode));
            }
        }
        Self::new(
            self.polarized,
            self.mode_names.clone(),
            elements,
            self.input,
            self.ports.clone(),
        )
    }
}

/// Kraus operator of one output port.
#[derive(Clone, Debug)]
pub struct PortKraus<T> {
    pub port: String,
    pub matrix: ComplexMatrix<T>,
}

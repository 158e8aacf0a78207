"""
Covariance complète par graphes croissants.

Les noeuds sont attachés un par un; à chaque ajout du noeud i, une seule
exécution de GaBP sur le graphe agrandi donne κ_j^i (j ∈ ∂i) et v_i, et
la covariance du préfixe C^{(i)} est étendue par un complément de Schur
de rang un:

    K_l = Σ_{j∈∂i} C^{(i)}_lj J_ij      (K_j = κ_j^i sur ∂i)
    C_ii = v_i,  C_il = v_i K_l,  C_ll' = C^{(i)}_ll' + v_i K_l K_l'

Les moyennes exactes du préfixe viennent de l'exécution GaBP précédente.

Dépendances:
    - cavity.variance: seuil de dégénérescence et décalage de champ
"""

from dataclasses import dataclass, field
import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..core import Schedule, run_gabp
from ..errors import DegenerateMean, NonConvergence, PrefixNotPositiveDefinite, UsageError
from ..model import GaussianModel
from ..utils.run_tracker import RunTracker
from .variance import FIELD_SHIFT, degenerate_threshold

logger = logging.getLogger(__name__)


@dataclass
class GrowthResult:
    """
    Covariance et moyennes obtenues par croissance.

    Attributes:
        ids: ids triés (indexation de covariance et means)
        covariance: covariance complète
        means: moyennes exactes (champ d'origine)
        order: ordre d'attachement utilisé
        bp_runs: nombre d'exécutions GaBP (n - 1 sans décalage)
        shift: décalage de champ cumulé appliqué pendant la croissance
    """

    ids: Tuple[int, ...]
    covariance: np.ndarray
    means: np.ndarray
    order: Tuple[int, ...]
    bp_runs: int
    shift: float
    tracker: RunTracker = field(repr=False, default=None)


def node_order(model: GaussianModel, order: Union[str, Sequence[int], None] = "id") -> Tuple[int, ...]:
    """
    Ordre d'attachement: "id" (croissant), "degree" (degré croissant puis id)
    ou une permutation explicite des ids.
    """
    if order is None or order == "id":
        return model.ids
    if order == "degree":
        return tuple(sorted(model.ids, key=lambda i: (model.degree(i), i)))
    if isinstance(order, str):
        raise UsageError(f"unknown node order {order!r} (expected 'id' or 'degree')")
    order = tuple(order)
    if sorted(order) != sorted(model.ids) or len(set(order)) != len(order):
        raise UsageError("node order must be a permutation of the model ids")
    return order


def full_covariance_growing(model: GaussianModel, order: Union[str, Sequence[int], None] = "id",
                            schedule: Optional[Schedule] = None) -> GrowthResult:
    """
    Covariance complète avec n - 1 exécutions de GaBP.

    Args:
        model (GaussianModel): modèle SPD
        order: ordre d'attachement (voir node_order)
        schedule (Schedule): paramètres d'itération

    Returns:
        GrowthResult: covariance, moyennes et compteurs

    Raises:
        NonConvergence: si GaBP ne converge pas sur un préfixe
        DegenerateMean: si m_i^BP reste nulle après décalage
        PrefixNotPositiveDefinite: si un préfixe n'est pas défini positif
    """
    schedule = schedule or Schedule()
    order = node_order(model, order)
    tracker = RunTracker("covariance_grow")
    n = model.n
    if n == 0:
        return GrowthResult((), np.zeros((0, 0)), np.zeros(0), (), 0, 0.0, tracker)

    first = model.node(order[0])
    cov = np.array([[first.s]])
    # moyennes exactes du préfixe, sous le décalage courant
    means = np.array([first.mu])
    prefix = GaussianModel((first,), ())
    s_inv = np.array([1.0 / first.s])
    shift = 0.0

    for t in range(1, n):
        i = order[t]
        node = model.node(i)
        placed = {nid: p for p, nid in enumerate(order[:t])}
        nbrs = [j for j in model.neighbors(i) if j in placed]
        J = np.array([model.coupling(i, j) for j in nbrs])
        cols = np.array([placed[j] for j in nbrs], dtype=int)

        grown = prefix.attach_node(node, [(j, model.coupling(i, j)) for j in nbrs])
        run = _grow_run(grown, shift, schedule, tracker)
        m_i = run.marginals.mean(i)

        # sans voisin placé, m_i ne sert pas de diviseur
        if nbrs and abs(m_i) < degenerate_threshold(grown.shift_fields(shift)):
            logger.info(f"🔁 Degenerate BP mean while attaching node {i}, shifting fields by {FIELD_SHIFT}")
            means = means + FIELD_SHIFT * (cov @ s_inv)
            shift += FIELD_SHIFT
            run = _grow_run(grown, shift, schedule, tracker, retry=True)
            m_i = run.marginals.mean(i)
            if abs(m_i) < degenerate_threshold(grown.shift_fields(shift)):
                raise DegenerateMean(f"BP mean of node {i} stays ~0 after the field shift")

        if len(nbrs):
            msg_m = np.array([run.messages.mean(j, i) for j in nbrs])
            msg_v = np.array([run.messages.variance(j, i) for j in nbrs])
            kappa = J * msg_v - (means[cols] - msg_m) / m_i
        else:
            kappa = np.zeros(0)

        den = 1.0 - node.s * float(J @ kappa)
        if not den > 0.0:
            raise PrefixNotPositiveDefinite(
                f"prefix of {t + 1} nodes ending with node {i} is not positive definite"
            )
        v_i = node.s / den

        K = cov[:, cols] @ J if len(nbrs) else np.zeros(t)
        K[cols] = kappa
        grown_cov = np.empty((t + 1, t + 1))
        grown_cov[:t, :t] = cov + v_i * np.outer(K, K)
        grown_cov[t, :t] = grown_cov[:t, t] = v_i * K
        grown_cov[t, t] = v_i
        cov = grown_cov

        means = np.array([run.marginals.mean(nid) for nid in order[:t + 1]])
        s_inv = np.append(s_inv, 1.0 / node.s)
        prefix = grown
        logger.debug(f"🌱 Attached node {i} ({t + 1}/{n}), v_i = {v_i:.6g}")

    # retour au champ d'origine: m(0) = m(δ) - δ C s⁻¹
    if shift:
        means = means - shift * (cov @ s_inv)

    perm = np.argsort(np.array(order))
    ids = tuple(np.array(order)[perm].tolist())
    tracker.log_summary()
    return GrowthResult(
        ids=ids,
        covariance=cov[np.ix_(perm, perm)],
        means=means[perm],
        order=order,
        bp_runs=tracker.runs,
        shift=shift,
        tracker=tracker,
    )


def _grow_run(grown: GaussianModel, shift: float, schedule: Schedule, tracker: RunTracker,
              retry: bool = False):
    run = run_gabp(grown.shift_fields(shift) if shift else grown, schedule)
    tracker.add_run(run.report, retry=retry)
    if not run.report.converged:
        raise NonConvergence(
            f"GaBP did not converge on a growth prefix of {grown.n} nodes", report=run.report
        )
    return run

"""JSON and text renderings of scores, statistics, findings and diffs."""

from typing import Any

from jinja2 import Template

from zero_coref.core.config import settings
from zero_coref.models.schemas import CorpusStats, Finding, ResolutionDiff, ScoreReport

SCORE_TEMPLATE = """\
{% for name, label in metrics %}\
METRIC {{ label }}:
Coreference: Recall: {{ "%.*f"|format(decimals, report[name].recall * 100) }}%\
  Precision: {{ "%.*f"|format(decimals, report[name].precision * 100) }}%\
  F1: {{ "%.*f"|format(decimals, report[name].f1 * 100) }}%
{% endfor %}\
CoNLL average F1: {{ "%.*f"|format(decimals, report.conll_avg_f1 * 100) }}%
AZP resolution ({{ hit_mode }}): Recall: {{ "%.*f"|format(decimals, report.azp.recall * 100) }}%\
  Precision: {{ "%.*f"|format(decimals, report.azp.precision * 100) }}%\
  F1: {{ "%.*f"|format(decimals, report.azp.f1 * 100) }}%
Documents: {{ report.documents }}
{% if config %}\
# {% for key, value in config|dictsort %}\
{{ key }}={{ value }}{% if not loop.last %} {% endif %}{% endfor %}
{% endif %}\
"""

STATS_TEMPLATE = """\
documents  {{ stats.documents }}
sentences  {{ stats.sentences }}
words      {{ stats.words }}
azps       {{ stats.azps }}
"""

FINDINGS_TEMPLATE = """\
{% for finding in findings %}\
{{ finding.path }}{% if finding.line %}:{{ finding.line }}{% endif %}: \
{{ finding.severity }} [{{ finding.code }}]\
{% if finding.doc_id %} {{ finding.doc_id }}{% endif %}: \
{{ finding.message }}
{% endfor %}\
{{ findings|length }} finding(s), {{ errors }} error(s)
"""

DIFF_TEMPLATE = """\
{% for diff in diffs %}\
== {{ diff.doc_id }}{% if diff.is_empty %}: pipeline and joint agree{% endif %}
{% for azp, pipeline_id, joint_id in diff.moved_azps %}\
  {{ azp }}: pipeline cluster {{ pipeline_id }}, joint cluster {{ joint_id }}
{% endfor %}\
{% for cluster in diff.pipeline_only %}\
  pipeline only: {{ cluster|join(" ") }}
{% endfor %}\
{% for cluster in diff.joint_only %}\
  joint only: {{ cluster|join(" ") }}
{% endfor %}\
{% endfor %}\
"""


class ReportService:
    """Service for rendering command output."""

    @staticmethod
    def score_json(report: ScoreReport, decimals: int | None = None) -> dict[str, Any]:
        """``{muc: {r, p, f1}, b_cubed, ceaf_phi4, conll_avg_f1, azp, config}``."""
        places = settings.report_decimals if decimals is None else decimals
        return {
            "muc": report.muc.rounded(places),
            "b_cubed": report.b_cubed.rounded(places),
            "ceaf_phi4": report.ceaf_phi4.rounded(places),
            "conll_avg_f1": round(report.conll_avg_f1, places),
            "azp": report.azp.rounded(places),
            "documents": report.documents,
            "config": report.config,
        }

    @staticmethod
    def score_text(report: ScoreReport, decimals: int = 2) -> str:
        return Template(SCORE_TEMPLATE).render(
            report=report,
            metrics=[("muc", "muc"), ("b_cubed", "bcub"), ("ceaf_phi4", "ceafe")],
            decimals=decimals,
            hit_mode=report.config.get("azp_hit_mode", settings.azp_hit_mode),
            config=report.config,
        )

    @staticmethod
    def stats_text(stats: CorpusStats) -> str:
        return Template(STATS_TEMPLATE).render(stats=stats)

    @staticmethod
    def findings_text(findings: list[Finding]) -> str:
        errors = sum(1 for finding in findings if finding.severity == "error")
        return Template(FINDINGS_TEMPLATE).render(findings=findings, errors=errors)

    @staticmethod
    def diff_json(diffs: list[ResolutionDiff]) -> list[dict[str, Any]]:
        return [
            {
                "doc_id": diff.doc_id,
                "moved_azps": [
                    {"azp": azp.model_dump(), "pipeline": pipeline_id, "joint": joint_id}
                    for azp, pipeline_id, joint_id in diff.moved_azps
                ],
                "pipeline_only": [list(cluster) for cluster in diff.pipeline_only],
                "joint_only": [list(cluster) for cluster in diff.joint_only],
            }
            for diff in diffs
        ]

    @staticmethod
    def diff_text(diffs: list[ResolutionDiff]) -> str:
        return Template(DIFF_TEMPLATE).render(diffs=diffs)

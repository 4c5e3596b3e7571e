"""
Generates Word document and plain-text reports of sieve runs.
"""

import os
from datetime import datetime
from typing import Any, Dict, List

from docx import Document
from docx.shared import Pt, Inches
from .logger import get_logger

logger = get_logger('document_generator')


class ReportGenerator:
    """Renders a SieveRunner results dictionary as .docx or text."""

    def __init__(self, output_dir: str = "output", filename_pattern: str = None):
        """Initialize with optional output directory and filename pattern.

        Args:
            output_dir: Directory for output files.
            filename_pattern: Pattern such as "Sieve_Report_{profile}_{date}.docx";
                {profile} and {date} are substituted.
        """
        self.output_dir = output_dir
        self.filename_pattern = filename_pattern or "Sieve_Report_{profile}_{date}.docx"
        self.doc = Document()

    def default_path(self, profile: str) -> str:
        timestamp = datetime.now().strftime("%Y_%m_%d")
        filename = self.filename_pattern.replace("{date}", timestamp).replace("{profile}", profile)
        return os.path.join(self.output_dir, filename)

    def create_report(self, results: Dict[str, Any], output_path: str = None) -> str:
        """Build the report document and save it."""
        if output_path is None:
            output_path = self.default_path(results.get('profile', 'run'))
        try:
            self.doc = Document()
            self._add_title(results)
            self._add_bound(results.get('bound') or {})
            self._add_cases(results.get('cases', []))
            self._add_nonrational(results.get('cases', []))
            self._add_errors(results.get('errors', []))

            os.makedirs(os.path.dirname(output_path) or '.', exist_ok=True)
            self.doc.save(output_path)
            logger.info(f"Report saved: {output_path}")
            return output_path
        except Exception as e:
            logger.error(f"Error creating report: {e}")
            raise

    # ======================================================================
    # Sections
    # ======================================================================

    def _add_title(self, results: Dict[str, Any]):
        self.doc.add_heading(
            f"Sieve Report - {results.get('profile', '')} - {datetime.now():%B %d, %Y}", level=1
        )
        if results.get('description'):
            self.doc.add_paragraph(results['description'])
        self.doc.add_paragraph("")

    def _add_bound(self, bound: Dict[str, Any]):
        self.doc.add_heading("Exponent Bound", level=2)
        p = self.doc.add_paragraph()
        run = p.add_run(bound.get('statement', 'No bound assembled.'))
        run.bold = True

        irr = bound.get('irreducibility', {})
        if irr:
            self.doc.add_paragraph(f"Irreducibility threshold I = {irr.get('I')} ({irr.get('variant')} variant)")
        if bound.get('modularity'):
            self.doc.add_paragraph(f"Modularity: {bound['modularity']}")
        if bound.get('absorbed_primes'):
            self.doc.add_paragraph(
                f"Primes absorbed by p > I: {', '.join(str(p) for p in bound['absorbed_primes'])}")
        for reason in bound.get('reasons', []):
            reason_p = self.doc.add_paragraph(f"  • {reason}")
            reason_p.runs[0].font.size = Pt(10)
        self.doc.add_paragraph("")

    def _add_cases(self, cases: List[Dict[str, Any]]):
        self.doc.add_heading("Case Outcomes", level=2)
        if not cases:
            self.doc.add_paragraph("No cases run.")
            return

        for case in cases:
            self.doc.add_heading(f"{case['case']}: {case.get('description', '')}", level=3)
            if case.get('deferred_to'):
                self.doc.add_paragraph(f"Settled by profile {case['deferred_to']}.")
                continue
            if case.get('error'):
                self.doc.add_paragraph(f"Error: {case['error']}")
                continue
            if case.get('missing'):
                self.doc.add_paragraph(f"No newform data at: {', '.join(case['missing'])}")

            outcomes = case.get('outcomes', [])
            if not outcomes:
                self.doc.add_paragraph("No newforms at the predicted levels.")
                continue

            table = self.doc.add_table(rows=1, cols=4)
            table.style = 'Light Grid Accent 1'
            table.columns[0].width = Inches(1.5)
            table.columns[1].width = Inches(1.5)
            table.columns[2].width = Inches(1.2)
            table.columns[3].width = Inches(2.3)

            header_cells = table.rows[0].cells
            for cell, title in zip(header_cells, ('Newform', 'Level', 'Status', 'Exceptional primes')):
                cell.text = title
            for cell in header_cells:
                for paragraph in cell.paragraphs:
                    for run in paragraph.runs:
                        run.bold = True

            for outcome in outcomes:
                row_cells = table.add_row().cells
                row_cells[0].text = str(outcome['newform'])
                row_cells[1].text = str(outcome['level'])
                row_cells[2].text = str(outcome['status'])
                primes = outcome.get('exceptional_primes', [])
                row_cells[3].text = ', '.join(str(p) for p in primes) if primes else '-'
            self.doc.add_paragraph("")

    def _add_nonrational(self, cases: List[Dict[str, Any]]):
        bounds = [nb for case in cases for nb in case.get('nonrational', [])]
        if not bounds:
            return
        self.doc.add_heading("Non-rational Newforms", level=2)
        for nb in bounds:
            p = self.doc.add_paragraph()
            run = p.add_run(f"{nb['newform']}:")
            run.bold = True
            if nb['status'] == 'survivor':
                self.doc.add_paragraph("  survives (every contributing value vanishes)")
                continue
            self.doc.add_paragraph(f"  M_f = {nb['M_f']} (primes {', '.join(str(q) for q in nb['primes'])})")
            for ideal, values in nb.get('values', {}).items():
                listed = ', '.join(f"P({t}) = {v}" for t, v in values.items())
                detail_p = self.doc.add_paragraph(f"  {ideal}: {listed}")
                detail_p.runs[0].font.size = Pt(9)

    def _add_errors(self, errors: List[Dict[str, Any]]):
        if not errors:
            return
        self.doc.add_heading("Errors", level=2)
        for err in errors:
            self.doc.add_paragraph(f"• {err.get('case', 'run')}: {err.get('error')}")

    # ======================================================================
    # Text report
    # ======================================================================

    def create_simple_text_report(self, results: Dict[str, Any]) -> str:
        """Plain-text rendering of the same content."""
        lines = []
        lines.append(f"Sieve Report - {results.get('profile', '')}")
        lines.append("=" * 60)
        lines.append("")

        bound = results.get('bound') or {}
        lines.append("BOUND:")
        lines.append(f"  {bound.get('statement', 'No bound assembled.')}")
        if bound.get('absorbed_primes'):
            lines.append(f"  absorbed by p > I: {', '.join(str(p) for p in bound['absorbed_primes'])}")
        lines.append("")

        lines.append("CASES:")
        cases = results.get('cases', [])
        if not cases:
            lines.append("  No cases run.")
        for case in cases:
            lines.append(f"  [{case['case']}] {case.get('description', '')}")
            if case.get('deferred_to'):
                lines.append(f"    settled by profile {case['deferred_to']}")
                continue
            if case.get('error'):
                lines.append(f"    error: {case['error']}")
            for level in case.get('missing', []):
                lines.append(f"    no data at level {level}")
            for outcome in case.get('outcomes', []):
                primes = ','.join(str(p) for p in outcome.get('exceptional_primes', []))
                lines.append(f"    • {outcome['newform']} ({outcome['level']}): {outcome['status']}"
                             + (f" p in {{{primes}}}" if primes else ''))
            for nb in case.get('nonrational', []):
                lines.append(f"    • non-rational {nb['newform']}: M_f = {nb['M_f']}")
        lines.append("")

        errors = results.get('errors', [])
        if errors:
            lines.append("ERRORS:")
            for err in errors:
                lines.append(f"  • {err.get('case', 'run')}: {err.get('error')}")
            lines.append("")

        lines.append("=" * 60)
        return '\n'.join(lines) + '\n'

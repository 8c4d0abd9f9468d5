// HTML renderers. All of them are pure string builders over server JSON,
// which keeps them testable without a DOM. Candidate rows are emitted in
// response order: the server already ranked them and the UI must not
// second-guess that order.

import {
  BindingJson,
  CandidateRow,
  ConsistencyFinding,
  ProcessView,
  TaskMatchJson,
} from './api.js';

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#039;');
}

export type TaskStatus = 'unspecified' | 'specified' | 'bound' | 'unresolved';

export function taskStatus(view: ProcessView, taskId: string): TaskStatus {
  if (view.bindings) {
    if (view.bindings.unresolved.includes(taskId)) return 'unresolved';
    if (taskId in view.bindings.bindings) return 'bound';
  }
  return taskId in view.specs ? 'specified' : 'unspecified';
}

const STATUS_LABELS: Record<TaskStatus, string> = {
  unspecified: 'needs spec',
  specified: 'specified',
  bound: 'bound',
  unresolved: 'unresolved',
};

function alertedTasks(findings: ConsistencyFinding[]): Set<string> {
  const alerted = new Set<string>();
  for (const finding of findings) {
    if (finding.severity !== 'error') continue;
    alerted.add(finding.upstreamTask);
    alerted.add(finding.downstreamTask);
  }
  alerted.delete('');
  return alerted;
}

export function renderTaskList(view: ProcessView): string {
  const serviceTasks = view.graph.nodes.filter((n) => n.kind === 'serviceTask');
  if (serviceTasks.length === 0) {
    return '<div class="empty-state">This process has no service tasks to annotate.</div>';
  }
  const alerted = alertedTasks(view.consistency);
  const items = serviceTasks.map((node) => {
    const status = taskStatus(view, node.id);
    const alert = alerted.has(node.id)
      ? '<span class="alert-icon" title="datatype conflict with a connected task">&#9888;</span>'
      : '';
    return (
      `<li class="task-item status-${status}" data-task-id="${escapeHtml(node.id)}">` +
      `<span class="task-name">${escapeHtml(node.name || node.id)}</span>` +
      `<span class="badge badge-${status}">${STATUS_LABELS[status]}</span>` +
      alert +
      '</li>'
    );
  });
  return `<ul class="task-list">${items.join('')}</ul>`;
}

function formatUtility(value: number | null): string {
  return value === null ? '-' : value.toFixed(4);
}

function bindingLabel(binding: BindingJson): string {
  if (binding.kind === 'atomic') {
    return `${binding.serviceKey}.${binding.operation}`;
  }
  return binding.steps.map((s) => `${s.serviceKey}.${s.operation}`).join(' &#8594; ');
}

function candidateRow(row: CandidateRow, grayed: boolean, bound: boolean): string {
  const classes = ['candidate-row'];
  if (grayed) classes.push('nonbindable');
  if (bound) classes.push('bound');
  return (
    `<tr class="${classes.join(' ')}" data-service="${escapeHtml(row.serviceKey)}" ` +
    `data-operation="${escapeHtml(row.operation)}">` +
    `<td>${escapeHtml(row.serviceKey)}.${escapeHtml(row.operation)}</td>` +
    `<td><span class="chip chip-${row.degree.toLowerCase()}">${row.degree}</span></td>` +
    `<td class="num">${row.keywordScore.toFixed(3)}</td>` +
    `<td class="num">${formatUtility(row.utility)}</td>` +
    '</tr>'
  );
}

/** Candidate table for one task, in exactly the order the server sent. */
export function renderCandidateTable(task: TaskMatchJson): string {
  if (task.candidates.length === 0) {
    return '<div class="empty-state">No candidate operations cleared the keyword threshold.</div>';
  }
  const unresolved = task.binding === null;
  const boundKey =
    task.binding !== null && task.binding.kind === 'atomic'
      ? `${task.binding.serviceKey}.${task.binding.operation}`
      : null;
  const header = unresolved
    ? '<div class="panel-note">No bindable service; the closest candidates are shown for reference.</div>'
    : task.binding !== null
      ? `<div class="panel-note">Bound: ${bindingLabel(task.binding)}</div>`
      : '';
  const rows = task.candidates.map((row) =>
    candidateRow(row, unresolved, boundKey === `${row.serviceKey}.${row.operation}`),
  );
  return (
    header +
    '<table class="candidates"><thead><tr>' +
    '<th>operation</th><th>degree</th><th>keyword</th><th>F</th>' +
    `</tr></thead><tbody>${rows.join('')}</tbody></table>`
  );
}

export interface ValidationReportJson {
  findings: { ruleId: string; severity: string; nodeId: string; message: string }[];
  ok: boolean;
}

export function renderValidationReport(report: ValidationReportJson): string {
  if (report.findings.length === 0) {
    return '<div class="report report-clean">Validation passed with zero findings.</div>';
  }
  const items = report.findings.map(
    (f) =>
      `<li class="finding finding-${f.severity}">` +
      `<code>${escapeHtml(f.ruleId)}</code> ${escapeHtml(f.nodeId)}: ${escapeHtml(f.message)}</li>`,
  );
  const tone = report.ok ? 'report-warnings' : 'report-errors';
  return `<div class="report ${tone}"><ul>${items.join('')}</ul></div>`;
}

export function renderSpecErrors(messages: string[]): string {
  if (messages.length === 0) return '';
  const items = messages.map((m) => `<li>${escapeHtml(m)}</li>`);
  return `<ul class="field-errors">${items.join('')}</ul>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner banner-error">${escapeHtml(message)}</div>`;
}

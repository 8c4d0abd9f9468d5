// Browser wiring: binds the pure renderers and panel state to the page.
// Everything the user does flows through TaskweaveClient; on fetch errors
// the stale view stays up behind an error banner.

import { ProcessView, TaskweaveClient } from './api.js';
import { downloadExport, emptyDraft, DraftSpec, TaskPanelState } from './state.js';
import {
  renderCandidateTable,
  renderErrorBanner,
  renderSpecErrors,
  renderTaskList,
  renderValidationReport,
  ValidationReportJson,
} from './views.js';

const QOS_ATTRIBUTES = ['latency_ms', 'reliability', 'throughput_rps', 'cost'];

interface AppElements {
  baseUrl: HTMLInputElement;
  projectId: HTMLInputElement;
  banner: HTMLElement;
  taskList: HTMLElement;
  panel: HTMLElement;
  report: HTMLElement;
}

function elements(): AppElements {
  const byId = (id: string) => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  return {
    baseUrl: byId('base-url') as HTMLInputElement,
    projectId: byId('project-id') as HTMLInputElement,
    banner: byId('banner'),
    taskList: byId('task-list'),
    panel: byId('task-panel'),
    report: byId('report-panel'),
  };
}

function draftFrom(view: ProcessView, taskId: string): DraftSpec {
  const spec = view.specs[taskId];
  if (!spec) return emptyDraft(QOS_ATTRIBUTES);
  return {
    objective: spec.objective,
    inputs: spec.inputs,
    outputs: spec.outputs,
    weights: spec.weights ? { ...spec.weights } : emptyDraft(QOS_ATTRIBUTES).weights,
  };
}

function saveBlob(filename: string, bytes: Uint8Array, mediaType: string): void {
  const blob = new Blob([bytes as BlobPart], { type: mediaType });
  const anchor = document.createElement('a');
  anchor.href = URL.createObjectURL(blob);
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(anchor.href);
}

class App {
  private client: TaskweaveClient;
  private view: ProcessView | null = null;
  private panel: TaskPanelState | null = null;

  constructor(private readonly els: AppElements) {
    this.client = new TaskweaveClient(this.els.baseUrl.value || 'http://127.0.0.1:8470');
  }

  async reload(): Promise<void> {
    this.client = new TaskweaveClient(this.els.baseUrl.value);
    try {
      this.view = await this.client.getProcess(this.els.projectId.value);
      this.els.banner.innerHTML = '';
      this.els.taskList.innerHTML = renderTaskList(this.view);
      this.attachTaskClicks();
    } catch (error) {
      // keep whatever was rendered; just explain what went wrong
      const message = error instanceof Error ? error.message : String(error);
      this.els.banner.innerHTML = renderErrorBanner(message);
    }
  }

  private attachTaskClicks(): void {
    for (const item of this.els.taskList.querySelectorAll<HTMLElement>('.task-item')) {
      item.addEventListener('click', () => {
        const taskId = item.dataset.taskId;
        if (taskId && this.view) this.openPanel(taskId);
      });
    }
  }

  private openPanel(taskId: string): void {
    if (!this.view) return;
    this.panel = new TaskPanelState(taskId, draftFrom(this.view, taskId));
    this.renderPanel();
  }

  private renderPanel(): void {
    if (!this.panel) return;
    const preview = this.panel.normalizedPreview();
    const sliders = Object.entries(this.panel.draft.weights)
      .map(([name, value]) => {
        const pct = (preview[name] * 100).toFixed(1);
        return (
          `<label class="slider-row">${name}` +
          `<input type="range" min="0" max="1" step="0.01" value="${value}" data-weight="${name}">` +
          `<span class="preview">${pct}%</span></label>`
        );
      })
      .join('');
    this.els.panel.innerHTML =
      `<h3>${this.panel.taskId}</h3>` +
      `<textarea id="objective">${this.panel.draft.objective}</textarea>` +
      `<div class="sliders">${sliders}</div>` +
      '<div id="panel-errors"></div>' +
      '<button id="rerank">Save spec and re-rank</button>' +
      '<div id="candidates"></div>';
    for (const slider of this.els.panel.querySelectorAll<HTMLInputElement>('input[data-weight]')) {
      slider.addEventListener('input', () => {
        this.panel?.setWeight(slider.dataset.weight ?? '', Number(slider.value));
        this.refreshPreviews();
      });
    }
    const objective = this.els.panel.querySelector<HTMLTextAreaElement>('#objective');
    objective?.addEventListener('input', () => this.panel?.setObjective(objective.value));
    this.els.panel
      .querySelector('#rerank')
      ?.addEventListener('click', () => void this.rerank());
  }

  private refreshPreviews(): void {
    if (!this.panel) return;
    const preview = this.panel.normalizedPreview();
    for (const slider of this.els.panel.querySelectorAll<HTMLInputElement>('input[data-weight]')) {
      const name = slider.dataset.weight ?? '';
      const label = slider.parentElement?.querySelector('.preview');
      if (label) label.textContent = `${(preview[name] * 100).toFixed(1)}%`;
    }
  }

  private async rerank(): Promise<void> {
    if (!this.panel) return;
    const errorsEl = this.els.panel.querySelector('#panel-errors');
    const candidatesEl = this.els.panel.querySelector('#candidates');
    if (!errorsEl || !candidatesEl) return;
    const outcome = await this.panel.saveAndRerank(this.client, this.els.projectId.value);
    errorsEl.innerHTML = renderSpecErrors(outcome.errors);
    if (outcome.kind === 'reranked' && this.panel.lastMatch) {
      candidatesEl.innerHTML = renderCandidateTable(this.panel.lastMatch);
      await this.reload(); // statuses may have changed
    }
  }

  async exportProcess(): Promise<void> {
    const projectId = this.els.projectId.value;
    const outcome = await downloadExport(this.client, projectId, 'executableBpmn', saveBlob);
    if (outcome.kind === 'needsMatch') {
      this.els.report.innerHTML = renderErrorBanner(outcome.message);
      return;
    }
    try {
      const validation = await this.client.fetchExport(projectId, 'validation');
      const report = JSON.parse(new TextDecoder().decode(validation.bytes)) as ValidationReportJson;
      this.els.report.innerHTML = renderValidationReport(report);
    } catch (error) {
      const message = error instanceof Error ? error.message : String(error);
      this.els.report.innerHTML = renderErrorBanner(message);
    }
  }
}

export function start(): void {
  const els = elements();
  const app = new App(els);
  document.getElementById('load')?.addEventListener('click', () => void app.reload());
  document.getElementById('export')?.addEventListener('click', () => void app.exportProcess());
}

if (typeof document !== 'undefined' && document.getElementById('task-list')) {
  start();
}

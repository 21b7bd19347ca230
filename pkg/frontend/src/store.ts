import { AppEvent, ViewState, initialState, reduce } from "./state.js";

export type Listener = (state: ViewState, event: AppEvent) => void;

export class Store {
  state: ViewState = initialState();
  private listeners: Listener[] = [];
  readonly log: AppEvent[] = [];

  dispatch(event: AppEvent): ViewState {
    this.state = reduce(this.state, event);
    this.log.push(event);
    for (const listener of this.listeners) listener(this.state, event);
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }
}
